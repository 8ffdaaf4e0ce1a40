#include "deso/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace deso {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Json mat_to_json(const Mat& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw InvalidInputError("JSON matrix '" + name + "' must be a non-empty array of rows");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
    Mat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw InvalidInputError("JSON matrix '" + name + "' has ragged rows");
        }
        for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = row.at(k).get<double>();
    }
    require_finite(M, name.c_str());
    return M;
}

Json system_to_json(const DescriptorSystem& sys) {
    Json j;
    j["E"] = mat_to_json(sys.E);
    j["A"] = mat_to_json(sys.A);
    j["B"] = mat_to_json(sys.B);
    j["C"] = mat_to_json(sys.C);
    if (sys.F) j["F"] = mat_to_json(*sys.F);
    return j;
}

DescriptorSystem system_from_json(const Json& j) {
    DescriptorSystem sys;
    sys.E = mat_from_json(j.at("E"), "E");
    sys.A = mat_from_json(j.at("A"), "A");
    sys.B = mat_from_json(j.at("B"), "B");
    sys.C = mat_from_json(j.at("C"), "C");
    if (j.contains("F") && !j.at("F").is_null()) sys.F = mat_from_json(j.at("F"), "F");
    sys.validate();
    return sys;
}

Json lti_to_json(const LtiSystem& lti) {
    Json j;
    j["A0"] = mat_to_json(lti.A0);
    j["B0"] = mat_to_json(lti.B0);
    j["E0"] = mat_to_json(lti.E0);
    j["C0"] = mat_to_json(lti.C0);
    j["F0"] = mat_to_json(lti.F0);
    return j;
}

LtiSystem lti_from_json(const Json& j) {
    LtiSystem lti;
    lti.A0 = mat_from_json(j.at("A0"), "A0");
    lti.B0 = mat_from_json(j.at("B0"), "B0");
    lti.E0 = mat_from_json(j.at("E0"), "E0");
    lti.C0 = mat_from_json(j.at("C0"), "C0");
    lti.F0 = mat_from_json(j.at("F0"), "F0");
    lti.validate();
    return lti;
}

Json gains_to_json(const ObserverGains& g) {
    Json j;
    j["kind"] = to_string(g.kind);
    j["A_O"] = mat_to_json(g.A_O);
    j["B_O_u"] = mat_to_json(g.B_O_u);
    j["B_O_y"] = mat_to_json(g.B_O_y);
    j["N_O"] = mat_to_json(g.N_O);
    return j;
}

ObserverGains gains_from_json(const Json& j) {
    ObserverGains g;
    g.A_O = mat_from_json(j.at("A_O"), "A_O");
    g.B_O_u = mat_from_json(j.at("B_O_u"), "B_O_u");
    g.B_O_y = mat_from_json(j.at("B_O_y"), "B_O_y");
    g.N_O = mat_from_json(j.at("N_O"), "N_O");
    const std::string kind = j.value("kind", "standard");
    g.kind = kind == "uio" ? ObserverKind::uio
                           : kind == "eso" ? ObserverKind::eso : ObserverKind::standard;
    if (g.A_O.rows() != g.A_O.cols() || g.B_O_u.rows() != g.A_O.rows() ||
        g.B_O_y.rows() != g.A_O.rows() || g.N_O.rows() != g.A_O.rows() ||
        g.N_O.cols() != g.B_O_y.cols()) {
        throw DimensionError("gains JSON: inconsistent dimensions");
    }
    return g;
}

Json report_to_json(const SynthesisResult& result) {
    const SynthesisReport& rep = result.report;
    Json j;
    j["feasible"] = rep.feasible;
    if (!rep.reason.empty()) j["reason"] = rep.reason;
    j["spectral_radius"] = rep.spectral_radius;
    j["data_residual"] = rep.data_residual;
    j["kernel_inclusion_residual"] =
        rep.kernel_inclusion_residual ? Json(*rep.kernel_inclusion_residual) : Json(nullptr);
    j["K1_norm"] = rep.K1.size() > 0 ? rep.K1.norm() : 0.0;
    Json checks;
    for (const auto& [name, value] : rep.checks) checks[name] = value;
    j["checks"] = checks;
    if (result.gains) j["gains"] = gains_to_json(*result.gains);
    return j;
}

Json summary_to_json(const MonteCarloSummary& summary) {
    Json j;
    j["trials"] = summary.trials;
    j["pe_passed"] = summary.pe_passed;
    j["agreements"] = summary.agreements;
    j["disagreements"] = summary.disagreements;
    Json cases = Json::array();
    for (const auto& c : summary.cases) {
        Json cj;
        cj["trial"] = c.trial;
        cj["pe_valid"] = c.pe_valid;
        if (c.pe_valid) {
            cj["data_feasible"] = c.data_feasible;
            cj["rank_condition"] = c.rank_condition;
            cj["model_verdict"] = c.model_verdict;
            cj["agree"] = c.agree;
        }
        cases.push_back(std::move(cj));
    }
    j["cases"] = std::move(cases);
    return j;
}

void write_dataset_csv(std::ostream& os, const DataRecord& rec) {
    rec.validate();
    os << "k";
    for (Eigen::Index i = 0; i < rec.m(); ++i) os << ",u_" << i;
    for (Eigen::Index i = 0; i < rec.q(); ++i) os << ",eta_" << i;
    for (Eigen::Index i = 0; i < rec.p(); ++i) os << ",y_" << i;
    for (Eigen::Index i = 0; i < rec.n(); ++i) os << ",x_" << i;
    os << "\n";
    const Eigen::Index rows = std::max<Eigen::Index>(rec.u_d.cols(), rec.T + 1);
    for (Eigen::Index k = 0; k < rows; ++k) {
        os << k;
        for (Eigen::Index i = 0; i < rec.m(); ++i) {
            os << ",";
            if (k < rec.u_d.cols()) os << format_double(rec.u_d(i, k));
        }
        for (Eigen::Index i = 0; i < rec.q(); ++i) {
            os << ",";
            if (k < rec.eta_d->cols()) os << format_double((*rec.eta_d)(i, k));
        }
        for (Eigen::Index i = 0; i < rec.p(); ++i) {
            os << ",";
            if (k <= rec.T) os << format_double(rec.y_d(i, k));
        }
        for (Eigen::Index i = 0; i < rec.n(); ++i) {
            os << ",";
            if (k <= rec.T) os << format_double(rec.x_d(i, k));
        }
        os << "\n";
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

DataRecord read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInputError("dataset CSV: empty file");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "k") {
        throw InvalidInputError("dataset CSV: first column must be k");
    }
    Eigen::Index m = 0, q = 0, p = 0, n = 0;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h.rfind("u_", 0) == 0) ++m;
        else if (h.rfind("eta_", 0) == 0) ++q;
        else if (h.rfind("y_", 0) == 0) ++p;
        else if (h.rfind("x_", 0) == 0) ++n;
        else throw InvalidInputError("dataset CSV: unknown column '" + h + "'");
    }
    if (m < 1 || p < 1 || n < 1) throw InvalidInputError("dataset CSV: missing signal columns");

    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    const Eigen::Index total = static_cast<Eigen::Index>(rows.size());
    if (total < 2) throw InvalidInputError("dataset CSV: need at least two rows");

    // T + 1 rows carry state/output samples; the rest is input padding.
    Eigen::Index state_rows = 0;
    const std::size_t x_first = 1 + m + q + p;
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw InvalidInputError("dataset CSV: ragged row");
        if (!r[x_first].empty()) ++state_rows;
    }
    if (state_rows < 2) throw InvalidInputError("dataset CSV: need T >= 1 state samples");

    DataRecord rec;
    rec.T = state_rows - 1;
    Eigen::Index u_len = 0;
    for (const auto& r : rows) {
        if (!r[1].empty()) ++u_len;
    }
    rec.u_d.resize(m, u_len);
    if (q > 0) rec.eta_d = Mat(q, u_len);
    rec.x_d.resize(n, state_rows);
    rec.y_d.resize(p, state_rows);
    for (Eigen::Index k = 0; k < total; ++k) {
        const auto& r = rows[static_cast<std::size_t>(k)];
        std::size_t col = 1;
        for (Eigen::Index i = 0; i < m; ++i, ++col) {
            if (k < u_len) rec.u_d(i, k) = std::stod(r[col]);
        }
        for (Eigen::Index i = 0; i < q; ++i, ++col) {
            if (k < u_len) (*rec.eta_d)(i, k) = std::stod(r[col]);
        }
        for (Eigen::Index i = 0; i < p; ++i, ++col) {
            if (k <= rec.T) rec.y_d(i, k) = std::stod(r[col]);
        }
        for (Eigen::Index i = 0; i < n; ++i, ++col) {
            if (k <= rec.T) rec.x_d(i, k) = std::stod(r[col]);
        }
    }
    rec.validate();
    return rec;
}

void write_run_csv(std::ostream& os, const EstimationRun& run, const Mat& x_truth) {
    const Eigen::Index n = run.xhat_traj.rows();
    const Eigen::Index L = run.xhat_traj.cols() - 1;
    os << "k";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x_" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",xhat_" << i;
    os << ",err_norm,recursion_residual_step\n";
    for (Eigen::Index k = 0; k <= L; ++k) {
        os << k;
        for (Eigen::Index i = 0; i < n; ++i) os << "," << format_double(x_truth(i, k));
        for (Eigen::Index i = 0; i < n; ++i) os << "," << format_double(run.xhat_traj(i, k));
        os << ",";
        if (run.err_traj.size() > k) os << format_double(run.err_traj(k));
        os << ",";
        if (k < run.recursion_residuals.size()) os << format_double(run.recursion_residuals(k));
        os << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace deso
