#include "multisync/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace multisync::io {

std::string format12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double round12(double v) { return std::strtod(format12(v).c_str(), nullptr); }

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ValidationError("invalid JSON in " + path.string() + ": " + ex.what());
    }
    return j;
}

RealMatrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ValidationError(what + ": expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    rows.reserve(j.size());
    for (const json& row : j) {
        if (!row.is_array()) throw ValidationError(what + ": rows must be arrays");
        std::vector<double> r;
        r.reserve(row.size());
        for (const json& v : row) {
            if (!v.is_number()) throw ValidationError(what + ": entries must be numbers");
            r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
    }
    RealMatrix m = RealMatrix::from_rows(rows);
    ensure_finite(m, what);
    return m;
}

json matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(round12(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::size_t order_from_json(const json& j) {
    if (!j.contains("n") || !j["n"].is_number_unsigned())
        throw ValidationError("graph JSON: missing or invalid \"n\"");
    return j["n"].get<std::size_t>();
}

void check_order(const RealMatrix& m, std::size_t n, const std::string& what) {
    if (m.rows() != n || m.cols() != n)
        throw ValidationError(what + ": matrix shape does not match \"n\"");
}

}  // namespace

WeightedDigraph digraph_from_json(const json& j) {
    const std::size_t n = order_from_json(j);
    if (j.contains("weights")) {
        RealMatrix w = matrix_from_json(j["weights"], "graph weights");
        check_order(w, n, "graph weights");
        return WeightedDigraph(std::move(w));
    }
    if (j.contains("laplacian")) {
        RealMatrix l = matrix_from_json(j["laplacian"], "graph laplacian");
        check_order(l, n, "graph laplacian");
        return digraph_from_laplacian(LaplacianMatrix(std::move(l)));
    }
    throw ValidationError("graph JSON: need \"weights\" or \"laplacian\"");
}

LaplacianMatrix laplacian_from_json(const json& j) {
    const std::size_t n = order_from_json(j);
    if (j.contains("laplacian")) {
        RealMatrix l = matrix_from_json(j["laplacian"], "graph laplacian");
        check_order(l, n, "graph laplacian");
        return LaplacianMatrix(std::move(l));
    }
    if (j.contains("weights")) {
        RealMatrix w = matrix_from_json(j["weights"], "graph weights");
        check_order(w, n, "graph weights");
        return laplacian(WeightedDigraph(std::move(w)));
    }
    throw ValidationError("graph JSON: need \"weights\" or \"laplacian\"");
}

namespace {

NodeDynamics dynamics_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError("dynamics JSON: need an object with \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "affine") {
        RealMatrix a = matrix_from_json(j.at("A"), "dynamics A");
        std::vector<double> b(a.rows(), 0.0);
        if (j.contains("b")) {
            b = j["b"].get<std::vector<double>>();
            if (b.size() != a.rows()) throw ValidationError("dynamics b: wrong length");
        }
        return NodeDynamics::affine(std::move(a), std::move(b));
    }
    if (kind == "lorenz") {
        const double sigma = j.value("sigma", 10.0);
        const double rho = j.value("rho", 28.0);
        const double beta = j.value("beta", 8.0 / 3.0);
        return NodeDynamics::lorenz(sigma, rho, beta);
    }
    if (kind == "logistic" || kind == "logistic_map") {
        const double a = j.value("a", 3.9);
        return NodeDynamics::logistic_map(a);
    }
    throw ValidationError("dynamics JSON: unknown kind \"" + kind + "\"");
}

}  // namespace

SystemSpec system_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ValidationError("system JSON: expected an object");

    std::vector<LaplacianMatrix> layers;
    if (j.contains("graphs")) {
        for (const json& entry : j["graphs"]) {
            const std::filesystem::path p = base_dir / entry.get<std::string>();
            layers.push_back(laplacian_from_json(load_json_file(p)));
        }
    }
    if (j.contains("laplacians")) {
        for (const json& entry : j["laplacians"]) {
            RealMatrix l = matrix_from_json(entry, "system laplacian");
            layers.emplace_back(std::move(l));
        }
    }
    if (layers.empty()) throw ValidationError("system JSON: need \"graphs\" or \"laplacians\"");

    if (!j.contains("D")) throw ValidationError("system JSON: need \"D\" inner couplings");
    std::vector<RealMatrix> ds;
    for (const json& entry : j["D"]) ds.push_back(matrix_from_json(entry, "system D"));

    if (!j.contains("dynamics")) throw ValidationError("system JSON: need \"dynamics\"");
    NodeDynamics dynamics = dynamics_from_json(j["dynamics"]);

    double c = 1.0;
    if (j.contains("c"))
        c = j["c"].get<double>();
    else if (dynamics.documented_c())
        c = *dynamics.documented_c();

    std::optional<RealMatrix> v;
    if (j.contains("V")) v = matrix_from_json(j["V"], "system V");
    std::optional<RealMatrix> p;
    if (j.contains("P")) p = matrix_from_json(j["P"], "system P");

    SystemSpec spec{MultiNetworkSystem::make(std::move(layers), std::move(ds), c, std::move(v),
                                             std::move(p)),
                    std::move(dynamics), std::nullopt};
    if (j.contains("xi")) spec.xi = j["xi"].get<double>();
    return spec;
}

json verdict_to_json(const SyncVerdict& v) {
    json j;
    j["criterion"] = v.criterion;
    j["satisfied"] = v.satisfied;
    j["margin"] = round12(v.margin);
    j["details"] = v.details;
    return j;
}

json certificate_to_json(const FeasibilityCertificate& c) {
    json j;
    j["U"] = matrix_to_json(c.u);
    j["slacks"] = {{"symmetry_error", round12(c.slacks.symmetry_error)},
                   {"row_sum_error", round12(c.slacks.row_sum_error)},
                   {"max_offdiagonal", round12(c.slacks.max_offdiagonal)},
                   {"min_eig_scaled", round12(c.slacks.min_eig_scaled)},
                   {"min_constraint_slack", round12(c.slacks.min_constraint_slack)},
                   {"irreducible", c.slacks.irreducible}};
    return j;
}

json ximax_to_json(const XiMaxResult& r) {
    json j;
    j["value"] = round12(r.value);
    j["bracket"] = {round12(r.lb), round12(r.ub)};
    j["epsilon"] = round12(r.epsilon);
    j["lower_bound"] = round12(r.lower_bound);
    j["upper_bound"] = round12(r.upper_bound);
    j["solver_nonconvergence"] = r.solver_nonconvergence;
    j["certificate"] = certificate_to_json(r.certificate_at_lb);
    return j;
}

json report_to_json(const SyncReport& r) {
    json j;
    j["final_error"] = round12(r.final_error);
    j["fit_rate_per_time"] = round12(r.fit_rate_per_time);
    j["fit_ratio_per_step"] = round12(r.fit_ratio_per_step);
    j["threshold"] = round12(r.threshold);
    j["synchronized"] = r.synchronized;
    json series = json::array();
    for (double e : r.error_series) series.push_back(round12(e));
    j["error_series"] = std::move(series);
    return j;
}

std::string trace_to_csv(const TrajectoryTrace& trace) {
    std::ostringstream out;
    out << "t,node,component,value\n";
    for (std::size_t s = 0; s < trace.states.size(); ++s)
        for (std::size_t i = 0; i < trace.nodes; ++i)
            for (std::size_t c = 0; c < trace.state_dim; ++c)
                out << format12(trace.times[s]) << ',' << i << ',' << c << ','
                    << format12(trace.states[s][i * trace.state_dim + c]) << '\n';
    return out.str();
}

std::string region_to_csv(const StabilityRegion& region, bool two_layers) {
    std::ostringstream out;
    out << (two_layers ? "re,im,re2,im2,phi\n" : "re,im,phi\n");
    for (const StabilityRegion::Sample& s : region.samples) {
        out << format12(s.lambda1.real()) << ',' << format12(s.lambda1.imag());
        if (two_layers)
            out << ',' << format12(s.lambda2.real()) << ',' << format12(s.lambda2.imag());
        out << ',' << format12(s.phi) << '\n';
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << content;
}

}  // namespace multisync::io
