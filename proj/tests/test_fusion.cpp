#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sphereview/fusion.hpp"
#include "sphereview/remap.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace sphereview;
using namespace sphereview::fusion;
using namespace testsup;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRad = kPi / 180.0;

GatingParams random_params(int channels, int branches, int reduction, std::mt19937& rng) {
    GatingParams p = GatingParams::zeros(channels, branches, reduction);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : p.w1) v = dist(rng);
    for (double& v : p.b1) v = dist(rng);
    for (double& v : p.w2) v = dist(rng);
    for (double& v : p.b2) v = dist(rng);
    return p;
}

std::filesystem::path temp_file(const char* stem) {
    return std::filesystem::temp_directory_path() /
           (std::string(stem) + "-" + std::to_string(::getpid()) + ".txt");
}

SavtConfig parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_savt_config(in);
}

} // namespace

TEST_SUITE("fusion") {

TEST_CASE("branch spec validation rejects degenerate sub-branches") {
    BranchSpec rot;
    rot.kind = BranchSpec::Kind::Horizontal;
    rot.angles = {0.5};
    CHECK_NOTHROW(rot.validate());

    rot.angles = {};
    CHECK_THROWS_AS(rot.validate(), std::invalid_argument);
    rot.angles = {0.5, 0.0};
    CHECK_THROWS_AS(rot.validate(), std::invalid_argument);
    rot.angles = {0.5};
    rot.zooms = {{{0.0, 0.0, -1.0}, 2.0}};
    CHECK_THROWS_AS(rot.validate(), std::invalid_argument);

    BranchSpec zoom;
    zoom.kind = BranchSpec::Kind::Zoom;
    zoom.zooms = {{{0.0, 0.0, -1.0}, 1.5}};
    CHECK_NOTHROW(zoom.validate());

    zoom.zooms = {};
    CHECK_THROWS_AS(zoom.validate(), std::invalid_argument);
    zoom.zooms = {{{0.0, 0.0, -1.0}, 1.0}};
    CHECK_THROWS_AS(zoom.validate(), std::invalid_argument);
    zoom.zooms = {{{0.0, 0.0, -1.0}, -0.5}};
    CHECK_THROWS_AS(zoom.validate(), std::invalid_argument);
    zoom.zooms = {{{0.0, 0.0, -1.0}, 1.5}};
    zoom.angles = {0.5};
    CHECK_THROWS_AS(zoom.validate(), std::invalid_argument);
}

TEST_CASE("branch specs expand to the expected transforms") {
    BranchSpec hrb;
    hrb.kind = BranchSpec::Kind::Horizontal;
    hrb.angles = {0.3, -0.7};
    auto hs = hrb.transforms();
    REQUIRE(hs.size() == 2);
    CHECK(approx_equal(hs[0], MobiusTransform::rotation({0.0, 0.0, 1.0}, 0.3), 1e-15));
    CHECK(approx_equal(hs[1], MobiusTransform::rotation({0.0, 0.0, 1.0}, -0.7), 1e-15));

    BranchSpec vrb;
    vrb.kind = BranchSpec::Kind::Vertical;
    vrb.angles = {0.4};
    CHECK(approx_equal(vrb.transforms()[0], MobiusTransform::rotation({0.0, 1.0, 0.0}, 0.4),
                       1e-15));

    BranchSpec zb;
    zb.kind = BranchSpec::Kind::Zoom;
    zb.zooms = {{{0.0, 1.0, 0.0}, 1.5}};
    CHECK(approx_equal(zb.transforms()[0], MobiusTransform::zoom_about({0.0, 1.0, 0.0}, 1.5),
                       1e-15));
}

TEST_CASE("run_branch with whole-column rotations is lossless") {
    std::mt19937 rng(61);
    Grid fg = random_fgrid(32, 16, 3, rng);

    BranchSpec spec;
    spec.kind = BranchSpec::Kind::Horizontal;
    spec.angles = {5 * 2.0 * kPi / 32, -9 * 2.0 * kPi / 32};
    CHECK(run_branch(fg, spec, Interp::Nearest) == fg);
}

TEST_CASE("run_branch applies the op inside the transformed frame") {
    std::mt19937 rng(67);
    Grid fg = random_fgrid(32, 16, 2, rng);

    BranchSpec spec;
    spec.kind = BranchSpec::Kind::Horizontal;
    spec.angles = {3 * 2.0 * kPi / 32};
    spec.op = [](const Grid& g) {
        Grid out = g;
        for (float& v : out.data()) v *= 2.0f;
        return out;
    };
    Grid got = run_branch(fg, spec, Interp::Nearest);
    for (size_t i = 0; i < fg.data().size(); ++i)
        CHECK(got.data()[i] == 2.0f * fg.data()[i]);

    spec.op = [](const Grid& g) { return Grid(GridDims{8, 4}, g.channels()); };
    CHECK_THROWS_AS(run_branch(fg, spec, Interp::Nearest), std::invalid_argument);
}

TEST_CASE("run_branch averages its sub-branches") {
    // Two ops that disagree by a constant: the mean splits the difference.
    std::mt19937 rng(71);
    Grid fg = random_fgrid(32, 16, 1, rng);
    BranchSpec spec;
    spec.kind = BranchSpec::Kind::Horizontal;
    spec.angles = {2.0 * kPi / 32, -2.0 * kPi / 32};
    spec.op = [](const Grid& g) {
        Grid out = g;
        for (float& v : out.data()) v += 1.0f;
        return out;
    };
    Grid got = run_branch(fg, spec, Interp::Nearest);
    for (size_t i = 0; i < fg.data().size(); ++i)
        CHECK(got.data()[i] == fg.data()[i] + 1.0f);
}

TEST_CASE("default branch specs match the published configuration") {
    auto specs = default_branch_specs();
    REQUIRE(specs.size() == 3);

    CHECK(specs[0].kind == BranchSpec::Kind::Horizontal);
    const std::vector<double> want_deg{-150, -120, -90, -60, -30, 30, 60, 90, 120, 150, 180};
    REQUIRE(specs[0].angles.size() == want_deg.size());
    for (size_t i = 0; i < want_deg.size(); ++i)
        CHECK(specs[0].angles[i] == doctest::Approx(want_deg[i] * kRad).epsilon(1e-15));

    CHECK(specs[1].kind == BranchSpec::Kind::Vertical);
    REQUIRE(specs[1].angles.size() == 2);
    CHECK(specs[1].angles[0] == doctest::Approx(30.0 * kRad));
    CHECK(specs[1].angles[1] == doctest::Approx(-30.0 * kRad));

    CHECK(specs[2].kind == BranchSpec::Kind::Zoom);
    REQUIRE(specs[2].zooms.size() == 4);
    CHECK(specs[2].zooms[0].rho == 0.8);
    CHECK(specs[2].zooms[1].rho == 1.2);
    CHECK(specs[2].zooms[2].rho == 0.7);
    CHECK(specs[2].zooms[3].rho == 1.3);
    for (const ZoomParam& z : specs[2].zooms) {
        CHECK(z.center.x == 0.0);
        CHECK(z.center.y == 0.0);
        CHECK(z.center.z == -1.0);
    }
    for (const BranchSpec& s : specs) CHECK_NOTHROW(s.validate());
}

TEST_CASE("zero gating parameters gate every branch at one half") {
    std::mt19937 rng(73);
    Grid fg = random_fgrid(16, 8, 8, rng);
    GatingParams p = GatingParams::zeros(8, 4);
    CHECK(p.hidden == 1); // 8/16 truncates to 0, floored to 1
    FusionWeights w = gate_weights(fg, p);
    REQUIRE(w.w.size() == 4);
    for (double v : w.w) CHECK(v == 0.5);
}

TEST_CASE("gate weights match the two-loop reference") {
    std::mt19937 rng(79);
    for (int t = 0; t < 10; ++t) {
        Grid fg = random_fgrid(12, 6, 6, rng);
        GatingParams p = random_params(6, 4, 2, rng);
        FusionWeights got = gate_weights(fg, p);
        auto want = oracle::gate_weights_ref(fg, p);
        REQUIRE(got.w.size() == want.size());
        for (size_t k = 0; k < want.size(); ++k) {
            CHECK(std::abs(got.w[k] - want[k]) < 1e-12);
            CHECK(got.w[k] > 0.0);
            CHECK(got.w[k] < 1.0);
        }
    }
}

TEST_CASE("gate weights depend on the features only through channel means") {
    std::mt19937 rng(83);
    Grid fg = random_fgrid(16, 8, 4, rng);
    GatingParams p = random_params(4, 3, 2, rng);
    FusionWeights base = gate_weights(fg, p);

    // Any spatial shuffle applied to every channel leaves the gates fixed.
    std::vector<size_t> perm(fg.plane_size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Grid shuffled(fg.dims(), fg.channels());
    for (int c = 0; c < fg.channels(); ++c)
        for (size_t i = 0; i < perm.size(); ++i)
            shuffled.plane(c)[perm[i]] = fg.plane(c)[i];

    FusionWeights moved = gate_weights(shuffled, p);
    for (size_t k = 0; k < base.w.size(); ++k) CHECK(std::abs(moved.w[k] - base.w[k]) < 1e-12);
}

TEST_CASE("gating is equivariant under paired channel permutation") {
    std::mt19937 rng(89);
    Grid fg = random_fgrid(12, 6, 5, rng);
    GatingParams p = random_params(5, 3, 1, rng);
    FusionWeights base = gate_weights(fg, p);

    std::vector<int> perm{3, 0, 4, 1, 2};
    Grid pfg(fg.dims(), fg.channels());
    GatingParams pp = p;
    for (int c = 0; c < 5; ++c) {
        std::copy(fg.plane(perm[c]), fg.plane(perm[c]) + fg.plane_size(), pfg.plane(c));
        for (int j = 0; j < p.hidden; ++j)
            pp.w1[static_cast<size_t>(j) * 5 + c] = p.w1[static_cast<size_t>(j) * 5 + perm[c]];
    }
    FusionWeights moved = gate_weights(pfg, pp);
    for (size_t k = 0; k < base.w.size(); ++k) CHECK(std::abs(moved.w[k] - base.w[k]) < 1e-12);
}

TEST_CASE("gating parameter validation") {
    GatingParams p = GatingParams::zeros(8, 3, 2);
    CHECK(p.hidden == 4);
    CHECK_NOTHROW(p.validate());

    GatingParams bad = p;
    bad.w1.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.channels = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.b2.push_back(0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    std::mt19937 rng(97);
    Grid fg = random_fgrid(8, 4, 6, rng);
    CHECK_THROWS_AS(gate_weights(fg, p), std::invalid_argument); // 6 channels vs 8
}

TEST_CASE("gating parameters survive a save/load round trip") {
    std::mt19937 rng(101);
    GatingParams p = random_params(32, 4, 16, rng); // hidden = 2 = 32/16
    auto path = temp_file("sphereview-gating-roundtrip");
    save_gating_params(p, path.string());
    GatingParams q = load_gating_params(path.string());
    std::filesystem::remove(path);

    CHECK(q.channels == p.channels);
    CHECK(q.branches == p.branches);
    CHECK(q.reduction == p.reduction);
    CHECK(q.hidden == p.hidden);
    CHECK(q.w1 == p.w1); // precision 17 text keeps doubles exact
    CHECK(q.b1 == p.b1);
    CHECK(q.w2 == p.w2);
    CHECK(q.b2 == p.b2);
}

TEST_CASE("gating files require channels divisible by the reduction") {
    // In-memory zeros floors the hidden width instead; the file format
    // normalizes to hidden = channels / reduction and rejects the rest.
    GatingParams p = GatingParams::zeros(8, 4, 16);
    auto path = temp_file("sphereview-gating-indivisible");
    save_gating_params(p, path.string());
    CHECK_THROWS_AS(load_gating_params(path.string()), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("malformed gating files are rejected") {
    auto path = temp_file("sphereview-gating-bad");
    {
        std::ofstream out(path);
        out << "not-a-gating-file 1\n4 2 2\n";
    }
    CHECK_THROWS_AS(load_gating_params(path.string()), std::runtime_error);
    {
        std::ofstream out(path);
        out << "sphereview-gating 1\n4 2 2\n0 0 0\n"; // truncated blocks
    }
    CHECK_THROWS_AS(load_gating_params(path.string()), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_gating_params((path / "missing").string()), std::runtime_error);
}

TEST_CASE("saf_fuse concatenates weighted channel blocks") {
    std::mt19937 rng(103);
    Grid b0 = random_fgrid(8, 4, 3, rng);
    Grid b1 = random_fgrid(8, 4, 3, rng);
    Grid b2 = random_fgrid(8, 4, 3, rng);

    // Unit weights: plain concatenation, bit for bit.
    Grid cat = saf_fuse({b0, b1, b2}, {{1.0, 1.0, 1.0}});
    CHECK(cat.channels() == 9);
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 8; ++col) {
                CHECK(cat.at(c, r, col) == b0.at(c, r, col));
                CHECK(cat.at(c + 3, r, col) == b1.at(c, r, col));
                CHECK(cat.at(c + 6, r, col) == b2.at(c, r, col));
            }

    // General weights scale whole blocks.
    Grid mix = saf_fuse({b0, b1, b2}, {{1.0, 0.5, 0.0}});
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 8; ++col) {
                CHECK(mix.at(c, r, col) == b0.at(c, r, col));
                CHECK(mix.at(c + 3, r, col) == 0.5f * b1.at(c, r, col));
                CHECK(mix.at(c + 6, r, col) == 0.0f);
            }
}

TEST_CASE("saf_fuse rejects inconsistent inputs") {
    Grid a(GridDims{8, 4}, 2), b(GridDims{8, 4}, 2);
    CHECK_THROWS_AS(saf_fuse({}, {{}}), std::invalid_argument);
    CHECK_THROWS_AS(saf_fuse({a, b}, {{1.0}}), std::invalid_argument);
    Grid c(GridDims{8, 4}, 3);
    CHECK_THROWS_AS(saf_fuse({a, c}, {{1.0, 1.0}}), std::invalid_argument);
    Grid d(GridDims{16, 8}, 2);
    CHECK_THROWS_AS(saf_fuse({a, d}, {{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("savt_forward stacks the original and transformed branches") {
    std::mt19937 rng(107);
    Grid fg = random_fgrid(32, 16, 4, rng);

    // Saturate the gates: b2 = 1000 makes every weight exactly 1, and a
    // whole-column rotation keeps each branch equal to the input, so the
    // output is the input stacked per branch.
    BranchSpec spec;
    spec.kind = BranchSpec::Kind::Horizontal;
    spec.angles = {7 * 2.0 * kPi / 32};
    GatingParams gating = GatingParams::zeros(4, 2);
    for (double& v : gating.b2) v = 1000.0;

    Grid out = savt_forward(fg, {spec}, gating, Interp::Nearest);
    REQUIRE(out.channels() == 8);
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 16; ++r)
            for (int col = 0; col < 32; ++col) {
                CHECK(out.at(c, r, col) == fg.at(c, r, col));
                CHECK(out.at(c + 4, r, col) == fg.at(c, r, col));
            }
}

TEST_CASE("savt_forward with the default configuration") {
    std::mt19937 rng(109);
    Grid fg = random_fgrid(32, 16, 4, rng);
    auto specs = default_branch_specs();
    GatingParams gating = GatingParams::zeros(4, static_cast<int>(1 + specs.size()));

    Grid out = savt_forward(fg, specs, gating);
    CHECK(out.channels() == 4 * fg.channels());
    CHECK(out.dims() == fg.dims());

    // Zero gating halves the original branch exactly.
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 16; ++r)
            for (int col = 0; col < 32; ++col)
                CHECK(out.at(c, r, col) == 0.5f * fg.at(c, r, col));

    // Bit-identical across runs.
    CHECK(savt_forward(fg, specs, gating) == out);

    GatingParams wrong = GatingParams::zeros(4, 2);
    CHECK_THROWS_AS(savt_forward(fg, specs, wrong), std::invalid_argument);
}

TEST_CASE("savt config defaults and branch disabling") {
    SavtConfig cfg = parse_str("");
    REQUIRE(cfg.specs.size() == 3);
    CHECK(cfg.specs[0].angles.size() == 11);
    CHECK(cfg.specs[1].angles.size() == 2);
    CHECK(cfg.specs[2].zooms.size() == 4);
    CHECK(cfg.gating_file.empty());
    CHECK(cfg.gating_reduction == 16);
    CHECK(cfg.interp == Interp::Bilinear);

    cfg = parse_str("hrb.degrees = none\n");
    REQUIRE(cfg.specs.size() == 2);
    CHECK(cfg.specs[0].kind == BranchSpec::Kind::Vertical);

    cfg = parse_str("hrb.degrees=none\nvrb.degrees=none\nzb.factors=none\n");
    CHECK(cfg.specs.empty());
}

TEST_CASE("savt config custom angles and steps") {
    SavtConfig cfg = parse_str("hrb.degrees=45,-45,90\nvrb.degrees=15\n");
    REQUIRE(cfg.specs.size() == 3);
    REQUIRE(cfg.specs[0].angles.size() == 3);
    CHECK(cfg.specs[0].angles[0] == doctest::Approx(45.0 * kRad));
    CHECK(cfg.specs[0].angles[1] == doctest::Approx(-45.0 * kRad));
    CHECK(cfg.specs[1].angles[0] == doctest::Approx(15.0 * kRad));

    cfg = parse_str("hrb.step_deg=90\n");
    REQUIRE(cfg.specs[0].angles.size() == 3); // -90, 90, 180
    CHECK(cfg.specs[0].angles.front() == doctest::Approx(-90.0 * kRad));
    CHECK(cfg.specs[0].angles.back() == doctest::Approx(180.0 * kRad));

    cfg = parse_str("hrb.step_deg=70\n"); // 180 not divisible: no half turn
    REQUIRE(cfg.specs[0].angles.size() == 4);
    CHECK(cfg.specs[0].angles.back() == doctest::Approx(140.0 * kRad));

    CHECK_THROWS_AS(parse_str("hrb.degrees=30\nhrb.step_deg=30\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("hrb.step_deg=0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("hrb.degrees=0,30\n"), std::invalid_argument);
}

TEST_CASE("savt config zoom centers broadcast or pair up") {
    SavtConfig cfg = parse_str("zb.factors=1.5,0.5\nzb.centers=0,0,1\n");
    const BranchSpec& zb = cfg.specs.back();
    REQUIRE(zb.zooms.size() == 2);
    for (const ZoomParam& z : zb.zooms) CHECK(z.center.z == 1.0);
    CHECK(zb.zooms[0].rho == 1.5);
    CHECK(zb.zooms[1].rho == 0.5);

    cfg = parse_str("zb.factors=1.5,0.5\nzb.centers=1,0,0; 0,1,0\n");
    REQUIRE(cfg.specs.back().zooms.size() == 2);
    CHECK(cfg.specs.back().zooms[0].center.x == 1.0);
    CHECK(cfg.specs.back().zooms[1].center.y == 1.0);

    // Centers alone retarget the default factors.
    cfg = parse_str("zb.centers=0,1,0\n");
    REQUIRE(cfg.specs.back().zooms.size() == 4);
    for (const ZoomParam& z : cfg.specs.back().zooms) CHECK(z.center.y == 1.0);

    // Unnormalized centers are normalized on parse.
    cfg = parse_str("zb.centers=0,0,-2\n");
    CHECK(cfg.specs.back().zooms[0].center.z == -1.0);

    CHECK_THROWS_AS(parse_str("zb.factors=1.5,0.5,2.0\nzb.centers=1,0,0;0,1,0\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_str("zb.centers=1,0,0;0,1,0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("zb.centers=0,0,0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("zb.factors=1.0\n"), std::invalid_argument);
}

TEST_CASE("savt config scalar options and error reporting") {
    SavtConfig cfg = parse_str(
        "# comment line\n"
        "gating.file = weights.txt  # trailing comment\n"
        "gating.reduction = 8\n"
        "interp = nearest\n");
    CHECK(cfg.gating_file == "weights.txt");
    CHECK(cfg.gating_reduction == 8);
    CHECK(cfg.interp == Interp::Nearest);

    CHECK_THROWS_AS(parse_str("unknown.key=1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("interp=cubic\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("gating.reduction=0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("gating.reduction=2.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("vrb.degrees=30\nvrb.degrees=40\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("just a line\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_str("hrb.degrees=abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(load_savt_config("/nonexistent/savt.cfg"), std::runtime_error);
}

} // TEST_SUITE
