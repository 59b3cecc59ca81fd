#include "curvestab/classify.hpp"
#include "curvestab/curvature.hpp"
#include "curvestab/io.hpp"
#include "curvestab/jordan.hpp"
#include "curvestab/linalg.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

namespace {

using namespace curvestab;

enum ExitCode { kOk = 0, kFailure = 1, kParseError = 2, kDegenerate = 3, kOverflow = 4 };

int log_level() {
    const char* env = std::getenv("CURVESTAB_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[curvestab] " << msg << "\n";
}

Vector parse_r0(const std::string& csv) {
    std::vector<double> vals;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ',')) {
        try {
            vals.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ParseError("--r0: cannot parse \"" + token + "\"");
        }
    }
    if (vals.empty()) throw ParseError("--r0: empty vector");
    return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct TraceArgs {
    std::string input;
    std::string r0_csv;
    double t_max = 50.0;
    double step = 0.05;
    int order = 1;
    std::uint64_t seed = 42;
    std::string out = "trace";
    std::string format = "csv";
    bool linear = false;
};

bool all_degenerate(const CurvatureTrace& trace) {
    for (const auto& point : trace.values) {
        for (const auto& k : point) {
            if (k.flag != KappaFlag::Degenerate) return false;
        }
    }
    return !trace.values.empty();
}

int run_trace(const TraceArgs& args) {
    const SystemInput input = load_system_input(args.input);
    const JordanSpec* spec = std::get_if<JordanSpec>(&input);
    const int n = spec ? spec->dimension() : static_cast<int>(std::get<Matrix>(input).rows());

    Vector r0;
    if (!args.r0_csv.empty()) {
        r0 = parse_r0(args.r0_csv);
        require_vector(r0, n, "--r0");
    } else {
        r0 = sample_initial_values(n, 1, args.seed).front();
        log_info("sampled initial value (seed " + std::to_string(args.seed) + ")");
    }

    TraceOptions opts;
    opts.order = args.order;
    const std::vector<double> grid = uniform_grid(args.t_max, args.step);
    const CurvatureTrace trace = spec ? sample_trace(*spec, r0, grid, opts)
                                      : sample_trace(std::get<Matrix>(input), r0, grid, opts);
    if (all_degenerate(trace)) {
        std::cerr << "error: constant-point trajectory (r' = 0 everywhere); no curvature to trace\n";
        return kDegenerate;
    }
    if (!trace.truncation.empty()) {
        std::cerr << "error: " << trace.truncation << "\n";
        return kOverflow;
    }
    if (args.format == "json") {
        write_file_atomic(args.out + ".json", trace_to_json(trace, args.linear));
    } else {
        write_file_atomic(args.out + ".csv", trace_to_csv(trace, args.linear));
    }
    log_info("wrote " + args.out + "." + args.format);
    return kOk;
}

struct ClassifyArgs {
    std::string input;
    int samples = 10;
    std::uint64_t seed = 42;
    double t_max = 50.0;
    double step = 0.05;
    std::string out = "report.json";
    bool majority = false;
};

int run_classify(const ClassifyArgs& args) {
    const SystemInput input = load_system_input(args.input);
    {
        const Matrix A = std::holds_alternative<JordanSpec>(input)
                             ? materialize(std::get<JordanSpec>(input))
                             : std::get<Matrix>(input);
        if (A.norm() == 0.0) {
            std::cerr << "error: constant-point trajectory (A = 0)\n";
            return kDegenerate;
        }
    }
    ReportOptions opts;
    opts.samples = args.samples;
    opts.seed = args.seed;
    opts.t_max = args.t_max;
    opts.step = args.step;
    if (args.majority) opts.classify.agreement = AgreementPolicy::Majority;

    const StabilityReport report = classify_system(input, opts);
    write_file_atomic(args.out, report_to_json(report));

    std::cout << "spectral oracle:   " << to_string(report.spectral.tag) << "\n";
    std::cout << "eigenvalues:      ";
    for (const Complex& z : report.spectrum.values) {
        std::cout << " " << z.real();
        if (z.imag() != 0.0) std::cout << (z.imag() > 0 ? "+" : "-") << std::abs(z.imag()) << "i";
    }
    std::cout << "\n";
    std::cout << "det:               " << format_double(report.det)
              << (report.invertible ? " (invertible)" : " (singular)") << "\n";
    if (report.symbolic) {
        std::cout << "symbolic limit:    " << to_string(report.symbolic->tag);
        if (report.symbolic->value) std::cout << " (C = " << *report.symbolic->value << ")";
        std::cout << "\n";
    }
    int counts[5] = {0, 0, 0, 0, 0};
    for (const auto& l : report.limits) counts[static_cast<int>(l.tag)]++;
    std::cout << "numeric limits:    ";
    const LimitTag tags[] = {LimitTag::TO_ZERO, LimitTag::TO_POSITIVE_CONSTANT,
                             LimitTag::TO_INFINITY, LimitTag::BOUNDED_NONVANISHING,
                             LimitTag::UNDETERMINED};
    bool first = true;
    for (LimitTag t : tags) {
        const int c = counts[static_cast<int>(t)];
        if (c == 0) continue;
        if (!first) std::cout << ", ";
        std::cout << to_string(t) << " x" << c;
        first = false;
    }
    std::cout << "\n";
    std::cout << "curvature verdict: " << to_string(report.verdict.tag) << "\n";
    std::cout << "report:            " << args.out << "\n";
    return kOk;
}

struct CompareArgs {
    std::string input;
    std::string transform;
    std::string r0_csv;
    double t_max = 50.0;
    double step = 0.05;
    int order = 1;
    std::uint64_t seed = 42;
    std::string out = "bounds.json";
};

int run_compare(const CompareArgs& args) {
    const SystemInput input = load_system_input(args.input);
    const Matrix A = std::holds_alternative<JordanSpec>(input)
                         ? materialize(std::get<JordanSpec>(input))
                         : std::get<Matrix>(input);
    const SystemInput pin = load_system_input(args.transform);
    if (!std::holds_alternative<Matrix>(pin)) throw ParseError("--transform must be a matrix");
    const Matrix P = std::get<Matrix>(pin);
    if (P.rows() != A.rows()) throw ParseError("transform dimension does not match the system");

    const SvdResult svd = singular_values(P);
    if (svd.rank < P.rows()) {
        std::cerr << "error: transform matrix is singular\n";
        return kParseError;
    }

    Vector r0;
    if (!args.r0_csv.empty()) {
        r0 = parse_r0(args.r0_csv);
        require_vector(r0, A.rows(), "--r0");
    } else {
        r0 = sample_initial_values(static_cast<int>(A.rows()), 1, args.seed).front();
    }

    const Matrix B = P * A * P.partialPivLu().inverse();
    const Vector v0 = P * r0;
    const std::vector<double> grid = uniform_grid(args.t_max, args.step);
    TraceOptions opts;
    opts.order = args.order;
    const CurvatureTrace tr = sample_trace(A, r0, grid, opts);
    const CurvatureTrace tv = sample_trace(B, v0, grid, opts);

    const Interval bounds = equivalence_bounds(P, 1.0, args.order);
    constexpr double kSlack = 1e-9;
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = -std::numeric_limits<double>::infinity();
    int violations = 0, compared = 0, skipped = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const LogKappa& kr = tr.values[i].back();
        const LogKappa& kv = tv.values[i].back();
        if (kr.flag != KappaFlag::Ok || kv.flag != KappaFlag::Ok) {
            ++skipped;
            continue;
        }
        const double ratio = std::exp(kv.log_value - kr.log_value);
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        ++compared;
        if (ratio < bounds.lo * (1.0 - kSlack) - kSlack ||
            ratio > bounds.hi * (1.0 + kSlack) + kSlack) {
            ++violations;
        }
    }

    nlohmann::json j;
    j["order"] = args.order;
    j["singular_values"] = svd.singular_values;
    j["interval"] = {{"lo", bounds.lo}, {"hi", bounds.hi}};
    j["compared_points"] = compared;
    j["skipped_points"] = skipped;
    if (compared > 0) {
        j["ratio_min"] = ratio_min;
        j["ratio_max"] = ratio_max;
    }
    j["violations"] = violations;
    j["r0"] = std::vector<double>(r0.data(), r0.data() + r0.size());
    write_file_atomic(args.out, j.dump(2) + "\n");

    std::cout << "interval:  [" << bounds.lo << ", " << bounds.hi << "]\n";
    if (compared > 0) {
        std::cout << "measured:  [" << ratio_min << ", " << ratio_max << "] over " << compared
                  << " points\n";
    }
    std::cout << "violations: " << violations << "\n";
    return violations == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory curvature analysis for linear time-invariant systems"};
    app.require_subcommand(1);

    TraceArgs trace_args;
    CLI::App* trace = app.add_subcommand("trace", "Sample curvature along a trajectory");
    trace->add_option("--input", trace_args.input, "Matrix or block-spec file")->required();
    trace->add_option("--r0", trace_args.r0_csv, "Initial value, comma-separated");
    trace->add_option("--t-max", trace_args.t_max, "End of the time window");
    trace->add_option("--step", trace_args.step, "Grid step");
    trace->add_option("--order", trace_args.order, "Highest curvature order");
    trace->add_option("--seed", trace_args.seed, "Seed when sampling r0");
    trace->add_option("--out", trace_args.out, "Output path prefix");
    trace->add_option("--format", trace_args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    trace->add_flag("--linear", trace_args.linear, "Emit raw kappa, saturated at 1e300");

    ClassifyArgs classify_args;
    CLI::App* classify = app.add_subcommand("classify", "Stability verdicts from curvature limits");
    classify->add_option("--input", classify_args.input, "Matrix or block-spec file")->required();
    classify->add_option("--samples", classify_args.samples, "Number of sampled initial values");
    classify->add_option("--seed", classify_args.seed, "Sampling seed");
    classify->add_option("--t-max", classify_args.t_max, "End of the time window");
    classify->add_option("--step", classify_args.step, "Grid step");
    classify->add_option("--out", classify_args.out, "Report path");
    classify->add_flag("--majority", classify_args.majority,
                       "Majority agreement across samples instead of unanimity");

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "Curvature ratio under an equivalence transform");
    compare->add_option("--input", compare_args.input, "Matrix or block-spec file")->required();
    compare->add_option("--transform", compare_args.transform, "Invertible matrix P")->required();
    compare->add_option("--r0", compare_args.r0_csv, "Initial value, comma-separated");
    compare->add_option("--t-max", compare_args.t_max, "End of the time window");
    compare->add_option("--step", compare_args.step, "Grid step");
    compare->add_option("--order", compare_args.order, "Curvature order i");
    compare->add_option("--seed", compare_args.seed, "Seed when sampling r0");
    compare->add_option("--out", compare_args.out, "Report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (trace->parsed()) return run_trace(trace_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (compare->parsed()) return run_compare(compare_args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const DegenerateTrajectoryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const OverflowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOverflow;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
