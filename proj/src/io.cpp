#include "curvestab/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace curvestab {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError("input is not valid JSON");
    return j;
}

Matrix matrix_from_rows(const json& rows, int n_declared) {
    if (!rows.is_array() || rows.empty()) throw ParseError("\"rows\" must be a non-empty array");
    const int n = static_cast<int>(rows.size());
    if (n_declared >= 0 && n_declared != n) {
        throw ParseError("\"n\" does not match the number of rows");
    }
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            throw ParseError("matrix rows must all have length n");
        }
        for (int j = 0; j < n; ++j) {
            if (!row[j].is_number()) throw ParseError("matrix entries must be numbers");
            A(i, j) = row[j].get<double>();
        }
    }
    require_system_matrix(A);
    return A;
}

}  // namespace

Matrix parse_matrix_json(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("rows")) throw ParseError("matrix JSON needs a \"rows\" key");
    const int n_declared = j.contains("n") ? j["n"].get<int>() : -1;
    return matrix_from_rows(j["rows"], n_declared);
}

Matrix parse_matrix_text(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw ParseError("matrix text: non-numeric token");
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("matrix text: no rows found");
    const int n = static_cast<int>(rows.size());
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) {
            throw ParseError("matrix text: rows must form a square matrix");
        }
        for (int j = 0; j < n; ++j) A(i, j) = rows[i][j];
    }
    require_system_matrix(A);
    return A;
}

JordanSpec parse_jordan_spec_json(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array()) {
        throw ParseError("jordan spec JSON needs a \"blocks\" array");
    }
    JordanSpec spec;
    for (const json& b : j["blocks"]) {
        if (!b.is_object() || !b.contains("kind")) {
            throw ParseError("each block needs a \"kind\"");
        }
        const std::string kind = b["kind"].get<std::string>();
        auto num = [&b](const char* key) {
            if (!b.contains(key) || !b[key].is_number()) {
                throw ParseError(std::string("block missing numeric \"") + key + "\"");
            }
            return b[key].get<double>();
        };
        if (kind == "R1") {
            spec.blocks.push_back(JordanBlock::r1(num("lambda")));
        } else if (kind == "RH") {
            spec.blocks.push_back(JordanBlock::rh(num("lambda"), static_cast<int>(num("p"))));
        } else if (kind == "C2") {
            spec.blocks.push_back(JordanBlock::c2(num("a"), num("b")));
        } else if (kind == "CH") {
            spec.blocks.push_back(
                JordanBlock::ch(num("a"), num("b"), static_cast<int>(num("m"))));
        } else {
            throw ParseError("unknown block kind \"" + kind + "\"");
        }
    }
    if (spec.blocks.empty()) throw ParseError("jordan spec has no blocks");
    return spec;
}

SystemInput parse_system_input(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        const json j = parse_json(text);
        if (j.is_object() && j.contains("blocks")) return parse_jordan_spec_json(text);
        if (j.is_object() && j.contains("rows")) return parse_matrix_json(text);
        throw ParseError("JSON input needs either a \"blocks\" or a \"rows\" key");
    }
    return parse_matrix_text(text);
}

SystemInput load_system_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read input file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_system_input(buf.str());
}

namespace {

const char* point_flag(const std::vector<LogKappa>& kappas) {
    bool zero = false;
    for (const auto& k : kappas) {
        if (k.flag == KappaFlag::Degenerate) return "degenerate";
        if (k.flag == KappaFlag::Zero) zero = true;
    }
    return zero ? "zero" : "ok";
}

double kappa_cell(const LogKappa& k, bool linear) {
    constexpr double kSaturation = 1e300;
    if (linear) {
        switch (k.flag) {
            case KappaFlag::Ok: return std::min(std::exp(k.log_value), kSaturation);
            case KappaFlag::Zero: return 0.0;
            case KappaFlag::Degenerate: return std::numeric_limits<double>::quiet_NaN();
        }
    }
    switch (k.flag) {
        case KappaFlag::Ok: return k.log_value;
        case KappaFlag::Zero: return -std::numeric_limits<double>::infinity();
        case KappaFlag::Degenerate: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string trace_to_csv(const CurvatureTrace& trace, bool linear) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= trace.order; ++i) {
        os << (linear ? ",kappa_" : ",log_kappa_") << i;
    }
    os << ",flags\n";
    for (std::size_t row = 0; row < trace.times.size(); ++row) {
        os << format_double(trace.times[row]);
        for (const auto& k : trace.values[row]) {
            os << "," << format_double(kappa_cell(k, linear));
        }
        os << "," << point_flag(trace.values[row]) << "\n";
    }
    return os.str();
}

std::string trace_to_json(const CurvatureTrace& trace, bool linear) {
    json j;
    j["order"] = trace.order;
    j["linear"] = linear;
    j["times"] = trace.times;
    json values = json::array();
    json flags = json::array();
    for (std::size_t row = 0; row < trace.times.size(); ++row) {
        json point = json::array();
        for (const auto& k : trace.values[row]) {
            const double cell = kappa_cell(k, linear);
            if (std::isfinite(cell)) {
                point.push_back(cell);
            } else {
                point.push_back(nullptr);
            }
        }
        values.push_back(std::move(point));
        flags.push_back(point_flag(trace.values[row]));
    }
    j[linear ? "kappa" : "log_kappa"] = std::move(values);
    j["flags"] = std::move(flags);
    if (!trace.truncation.empty()) j["truncation"] = trace.truncation;
    return j.dump(2) + "\n";
}

namespace {

json verdict_to_json(const StabilityVerdict& v) {
    return json{{"verdict", to_string(v.tag)},
                {"basis", to_string(v.basis)},
                {"evidence", v.evidence}};
}

json limit_to_json(const LimitClass& l) {
    json j{{"limit", to_string(l.tag)}, {"confidence", l.confidence}};
    if (l.value) j["value"] = *l.value;
    if (l.exact) j["exact"] = true;
    if (!l.note.empty()) j["note"] = l.note;
    return j;
}

}  // namespace

std::string report_to_json(const StabilityReport& report) {
    json j;
    j["spectral"] = verdict_to_json(report.spectral);
    json eigs = json::array();
    for (const Complex& z : report.spectrum.values) {
        eigs.push_back(json{{"re", z.real()}, {"im", z.imag()}});
    }
    j["spectral"]["eigenvalues"] = std::move(eigs);

    json curv = verdict_to_json(report.verdict);
    json per = json::array();
    for (std::size_t i = 0; i < report.limits.size(); ++i) {
        json entry = limit_to_json(report.limits[i]);
        if (i < report.initial_values.size()) {
            entry["r0"] = std::vector<double>(
                report.initial_values[i].data(),
                report.initial_values[i].data() + report.initial_values[i].size());
        }
        per.push_back(std::move(entry));
    }
    curv["per_initial_value"] = std::move(per);
    j["curvature"] = std::move(curv);

    if (report.symbolic) j["symbolic"] = limit_to_json(*report.symbolic);
    if (report.exponents) {
        json e;
        if (report.exponents->theta) e["theta"] = *report.exponents->theta;
        e["eta_bound"] = report.exponents->eta_bound;
        e["xi"] = report.exponents->xi;
        if (report.exponents->chi_bound) e["chi_bound"] = *report.exponents->chi_bound;
        j["exponents"] = std::move(e);
    }
    j["det"] = report.det;
    j["invertible"] = report.invertible;
    j["samples"] = report.samples;
    j["seed"] = report.seed;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CurvestabError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw CurvestabError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace curvestab
