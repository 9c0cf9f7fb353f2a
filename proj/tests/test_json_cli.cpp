#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chg/json_io.hpp"
#include "util.hpp"

using namespace chg;
using namespace chg::testutil;

namespace {

std::string write_temp(const std::string& name, const json& j) {
    const std::string path = "/tmp/chg_test_" + name + ".json";
    std::ofstream out(path);
    out << j.dump();
    return path;
}

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CHG_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) output += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

} // namespace

TEST_CASE("json round trips") {
    Rng rng(3);
    for (int it = 0; it < 20; ++it) {
        const HoloIsometry a = rand_isometry(rng, it % 2 ? siegel_form() : ball_form());
        const HoloIsometry b = isometry_from_json(to_json(a));
        CHECK(maxabs(a.lift - b.lift) < 1e-12);
        CHECK(a.form.model == b.form.model);

        const AntiIsometry s = rand_reflection(rng, ball_form());
        const AntiIsometry s2 = anti_from_json(to_json(s));
        CHECK(maxabs(s.souriau - s2.souriau) < 1e-12);
    }
    const HeisPoint p{cplx(1.5, -0.25), 3.0};
    const HeisPoint q = heis_from_json(to_json(p));
    CHECK(p.z == q.z);
    CHECK(p.t == q.t);

    PointTuple t{ball_form(), {Vec3(0, 0, 1), Vec3(1, 0, 1)}};
    const PointTuple t2 = tuple_from_json(to_json(t));
    CHECK(t2.points.size() == 2);
    CHECK(maxabs(t2.points[1] - t.points[1]) == 0.0);

    CHECK_THROWS(cplx_from_json(json::array({1.0})));
    CHECK_THROWS(mat3_from_json(json::array({1.0, 2.0})));
    CHECK_THROWS(form_from_json(json{{"model", "upper-half"}}));
}

TEST_CASE("cli classify") {
    const auto d2 = write_temp("d2", to_json(dilation(2.0)));
    const CliResult r = run_cli("classify " + d2);
    CHECK(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out.at("tag") == "loxodromic");
    CHECK(out.at("f").get<double>() == doctest::Approx(0.5625));

    const auto id = write_temp("id", to_json(HoloIsometry{Mat3::identity(), ball_form()}));
    const json out2 = json::parse(run_cli("classify " + id).output);
    CHECK(out2.at("tag") == "identity");

    // Non-form-preserving matrix: exit 65.
    json bad = to_json(HoloIsometry{Mat3::identity(), ball_form()});
    bad["lift"][0] = json::array({2.0, 0.0});
    const auto badp = write_temp("bad", bad);
    CHECK(run_cli("classify " + badp).exit_code == 65);

    // Malformed JSON: exit 64.
    {
        std::ofstream out3("/tmp/chg_test_malformed.json");
        out3 << "{ not json";
    }
    CHECK(run_cli("classify /tmp/chg_test_malformed.json").exit_code == 64);
    CHECK(run_cli("classify /tmp/chg_test_does_not_exist.json").exit_code == 64);
}

TEST_CASE("cli decompose") {
    Rng rng(11);
    const AntiIsometry s1 = rand_reflection(rng, ball_form());
    const AntiIsometry s2 = rand_reflection(rng, ball_form());
    const AntiIsometry s3 = rand_reflection(rng, ball_form());
    const auto a = write_temp("a", to_json(anti_compose(s1, s2)));
    const auto b = write_temp("b", to_json(anti_compose(s1, s3)));
    const CliResult r = run_cli("decompose " + a + " " + b);
    CHECK(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out.at("verdict") == "decomposable");
    REQUIRE(out.contains("witness"));
    // The witness parses back into three genuine reflections.
    const AntiIsometry w1 = anti_from_json(out["witness"]["sigma1"]);
    CHECK(is_real_reflection(w1));

    // A trace-obstructed pair exits 1.
    for (int it = 0; it < 20; ++it) {
        const HoloIsometry x = rand_isometry(rng, ball_form());
        const HoloIsometry y = rand_isometry(rng, ball_form());
        const cplx tr = trace(commutator(x, y).lift);
        if (std::abs(tr.imag()) < 1e-3) continue;
        const auto xa = write_temp("x", to_json(x));
        const auto yb = write_temp("y", to_json(y));
        const CliResult r2 = run_cli("decompose " + xa + " " + yb);
        CHECK(r2.exit_code == 1);
        CHECK(json::parse(r2.output).at("rationale") == "trace_obstruction");
        break;
    }

    // Mixed forms: exit 65.
    const auto sg = write_temp("sg", to_json(dilation(2.0)));
    CHECK(run_cli("decompose " + a + " " + sg).exit_code == 65);
}

TEST_CASE("cli invariants") {
    // Real-plane boundary triple in the Siegel model: cartan = 0.
    PointTuple t{siegel_form(), {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(-0.5, 1, 1)}};
    const auto path = write_temp("tri", to_json(t));
    const json out = json::parse(run_cli("invariants " + path).output);
    CHECK(std::abs(out.at("cartan").get<double>()) < 1e-12);

    // The separating cocyclic quadruple: X = -1.
    PointTuple q{ball_form(),
                 {Vec3(1, 0, 1), Vec3(-1, 0, 1), Vec3(cplx(0, 1), 0, 1), Vec3(cplx(0, -1), 0, 1)}};
    const auto qpath = write_temp("quad", to_json(q));
    const json out2 = json::parse(run_cli("invariants " + qpath).output);
    CHECK(out2.at("reality") == "negative_real");
    CHECK(out2.at("reality_case") == "cocyclic_separating");
    CHECK(cplx_from_json(out2.at("cross_ratio")).real() == doctest::Approx(-1.0));
}

TEST_CASE("cli heisenberg") {
    const json out =
        json::parse(run_cli("heisenberg mul '{\"z\":[1,0],\"t\":0}' '{\"z\":[0,1],\"t\":0}'").output);
    CHECK(cplx_from_json(out.at("z")) == cplx(1, 1));
    CHECK(out.at("t").get<double>() == doctest::Approx(-2.0));

    const auto iso = write_temp("t14", to_json(heis_translation(1.0, 4.0)));
    const json fan = json::parse(run_cli("heisenberg fan " + iso).output);
    CHECK(cplx_from_json(fan.at("w")) == cplx(1, 0));
    CHECK(fan.at("k").get<double>() == doctest::Approx(1.0));

    CHECK(run_cli("heisenberg bogus-op").exit_code == 64);
}

TEST_CASE("cli picard-verify") {
    const CliResult r = run_cli("picard-verify --d 11");
    CHECK(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out.at("all_passed") == true);
    CHECK(out.at("paper_index_claim") == 2);
    // Bit-identical across runs.
    CHECK(run_cli("picard-verify --d 11").output == r.output);
    CHECK(run_cli("picard-verify --d 5").exit_code == 64);
}

TEST_CASE("cli deltoid-sample") {
    const CliResult r = run_cli("deltoid-sample --n 16");
    CHECK(r.exit_code == 0);
    std::istringstream in(r.output);
    std::string line;
    std::getline(in, line);
    CHECK(line == "phi,re,im,f_residual");
    int rows = 0;
    bool saw_three = false, saw_minus_one = false;
    while (std::getline(in, line)) {
        double phi, re, im, res;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &phi, &re, &im, &res) == 4);
        const double radius = std::hypot(re, im);
        CHECK(radius <= 3.0 + 1e-9);
        CHECK(std::abs(res) <= 1e-8);
        if (std::abs(re - 3.0) < 1e-6 && std::abs(im) < 1e-6) saw_three = true;
        if (std::abs(re + 1.0) < 1e-6 && std::abs(im) < 1e-6) saw_minus_one = true;
        ++rows;
    }
    CHECK(rows == 16);
    CHECK(saw_three);       // f(3) = 0
    CHECK(saw_minus_one);   // f(-1) = 0, the ray phi = pi
    CHECK(run_cli("deltoid-sample --n 4").exit_code == 64);
}
