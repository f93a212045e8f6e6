#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace multisync {

/// Base error type for the library. Subtypes map onto the CLI exit-code
/// contract: ValidationError -> 2, HypothesisError -> 3, NumericalError -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input (bad dimensions, negative weights, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A theorem's hypothesis does not hold for the given data.
class HypothesisError : public Error {
public:
    explicit HypothesisError(const std::string& what) : Error(what) {}
};

/// An iterative method diverged or failed to converge.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

using Complex = std::complex<double>;

/// Dense real matrix, row-major storage.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static RealMatrix identity(std::size_t n);
    static RealMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static RealMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static RealMatrix diag(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_ && rows_ > 0; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    RealMatrix transpose() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    RealMatrix& operator+=(const RealMatrix& o);
    RealMatrix& operator-=(const RealMatrix& o);
    RealMatrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

RealMatrix operator+(RealMatrix a, const RealMatrix& b);
RealMatrix operator-(RealMatrix a, const RealMatrix& b);
RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator*(double s, RealMatrix a);
std::vector<double> operator*(const RealMatrix& a, const std::vector<double>& x);

/// Kronecker product, (rA*rB) x (cA*cB).
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

/// (A + A^T)/2. Requires a square matrix.
RealMatrix sym_part(const RealMatrix& a);

/// Throws ValidationError if any entry is NaN or infinite.
void ensure_finite(const RealMatrix& a, const std::string& context);

/// Solves A x = b by partial-pivot Gaussian elimination.
std::vector<double> solve_linear(RealMatrix a, std::vector<double> b);

/// Dense complex matrix, row-major storage.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = Complex(0.0, 0.0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix from_real(const RealMatrix& a);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_ && rows_ > 0; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    Complex operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    ComplexMatrix adjoint() const;
    double frobenius_norm() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<Complex> operator*(const ComplexMatrix& a, const std::vector<Complex>& x);

}  // namespace multisync
