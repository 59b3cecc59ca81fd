#include "curvestab/io.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace curvestab;
using namespace testutil;

TEST_CASE("matrix parsing: JSON and plain text") {
    const Matrix A = parse_matrix_json(R"({"n": 2, "rows": [[1, 2], [3, 4]]})");
    CHECK(A(0, 1) == 2.0);
    CHECK(A(1, 0) == 3.0);

    const Matrix B = parse_matrix_text("1 2\n3 4\n");
    CHECK((A - B).norm() == 0.0);

    CHECK_THROWS_AS(parse_matrix_json(R"({"n": 3, "rows": [[1, 2], [3, 4]]})"), ParseError);
    CHECK_THROWS_AS(parse_matrix_json(R"({"rows": [[1, 2], [3]]})"), ParseError);
    CHECK_THROWS_AS(parse_matrix_text("1 2\n3\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix_text("1 x\n3 4\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix_text(""), ParseError);
}

TEST_CASE("jordan spec parsing") {
    const JordanSpec spec = parse_jordan_spec_json(
        R"({"blocks": [{"kind":"R1","lambda":-1},
                        {"kind":"RH","lambda":0,"p":3},
                        {"kind":"C2","a":0,"b":1},
                        {"kind":"CH","a":-2,"b":4,"m":2}]})");
    REQUIRE(spec.blocks.size() == 4);
    CHECK(spec.dimension() == 1 + 3 + 2 + 4);
    CHECK(spec.blocks[1].kind == BlockKind::RH);
    CHECK(spec.blocks[3].order == 2);

    CHECK_THROWS_AS(parse_jordan_spec_json(R"({"blocks": []})"), ParseError);
    CHECK_THROWS_AS(parse_jordan_spec_json(R"({"blocks": [{"kind":"XX"}]})"), ParseError);
    CHECK_THROWS_AS(parse_jordan_spec_json(R"({"blocks": [{"kind":"C2","a":0,"b":-1}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_jordan_spec_json(R"({"blocks": [{"kind":"RH","lambda":0}]})"),
                    ParseError);
}

TEST_CASE("system input auto-detection") {
    CHECK(std::holds_alternative<JordanSpec>(
        parse_system_input(R"({"blocks":[{"kind":"R1","lambda":2}]})")));
    CHECK(std::holds_alternative<Matrix>(parse_system_input(R"({"rows":[[1]]})")));
    CHECK(std::holds_alternative<Matrix>(parse_system_input("0 1\n-1 0\n")));
    CHECK_THROWS_AS(parse_system_input(R"({"something": 1})"), ParseError);
    CHECK_THROWS_AS(parse_system_input("{not json"), ParseError);
}

TEST_CASE("trace CSV: exact header and marker cells") {
    CurvatureTrace trace;
    trace.order = 2;
    trace.times = {0.0, 0.5};
    trace.values = {{LogKappa::ok(-1.5), LogKappa::zero()},
                    {LogKappa::ok(2.0), LogKappa::degenerate()}};
    const std::string csv = trace_to_csv(trace);
    CHECK(csv.rfind("t,log_kappa_1,log_kappa_2,flags\n", 0) == 0);
    CHECK(csv.find("0,-1.5,-inf,zero\n") != std::string::npos);
    CHECK(csv.find("0.5,2,nan,degenerate\n") != std::string::npos);

    const std::string linear = trace_to_csv(trace, /*linear=*/true);
    CHECK(linear.rfind("t,kappa_1,kappa_2,flags\n", 0) == 0);
    CHECK(linear.find("0.5,7.38905609893065,nan,degenerate") != std::string::npos);
}

TEST_CASE("trace JSON mirrors the CSV content") {
    CurvatureTrace trace;
    trace.order = 1;
    trace.times = {0.0, 1.0};
    trace.values = {{LogKappa::ok(0.25)}, {LogKappa::zero()}};
    const std::string json = trace_to_json(trace);
    CHECK(json.find("\"times\"") != std::string::npos);
    CHECK(json.find("0.25") != std::string::npos);
    CHECK(json.find("null") != std::string::npos);
    CHECK(json.find("\"zero\"") != std::string::npos);
}

TEST_CASE("report JSON carries every section") {
    ReportOptions opts;
    opts.samples = 3;
    opts.seed = 5;
    opts.t_max = 30.0;
    JordanSpec spec{{JordanBlock::c2(-2, 4), JordanBlock::c2(-2, 4), JordanBlock::r1(-2)}};
    const std::string json = report_to_json(classify_system(spec, opts));
    for (const char* key :
         {"\"spectral\"", "\"curvature\"", "\"per_initial_value\"", "\"symbolic\"",
          "\"exponents\"", "\"det\"", "\"r0\"", "\"eigenvalues\"", "\"verdict\""}) {
        CHECK(json.find(key) != std::string::npos);
    }
}

TEST_CASE("deterministic serialization for identical runs") {
    ReportOptions opts;
    opts.samples = 4;
    opts.seed = 31337;
    opts.t_max = 20.0;
    const std::string a = report_to_json(classify_system(example1_matrix(), opts));
    const std::string b = report_to_json(classify_system(example1_matrix(), opts));
    CHECK(a == b);

    Vector r0(4);
    r0 << 1, 1, 1, 2;
    const auto t1 = sample_trace(example1_matrix(), r0, uniform_grid(5.0, 0.05));
    const auto t2 = sample_trace(example1_matrix(), r0, uniform_grid(5.0, 0.05));
    CHECK(trace_to_csv(t1) == trace_to_csv(t2));
}

TEST_CASE("atomic writes replace, never append or leave temp files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "curvestab_io_test";
    fs::create_directories(dir);
    const fs::path target = dir / "out.csv";
    write_file_atomic(target, "first\n");
    write_file_atomic(target, "second\n");
    std::ifstream in(target);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.05, 1.0 / 3.0, -800.0, 1e-300, 123456.789}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
