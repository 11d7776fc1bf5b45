#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sphereview/grid.hpp"
#include "sphereview/mobius.hpp"

namespace sphereview::fusion {

// Identity-defaulted per-branch grid operation hook; a registered op must
// preserve the grid shape.
using BranchOp = std::function<Grid(const Grid&)>;

struct ZoomParam {
    UnitVector3 center{0.0, 0.0, -1.0};
    double rho = 1.0;
};

// One View-Transformer branch family: horizontal rotations about (0,0,1),
// vertical rotations about (0,1,0), or zooms about configured centers.
struct BranchSpec {
    enum class Kind { Horizontal, Vertical, Zoom };
    Kind kind = Kind::Horizontal;
    std::vector<double> angles; // radians, nonzero; rotation kinds only
    std::vector<ZoomParam> zooms; // rho > 0 and != 1; zoom kind only
    BranchOp op; // empty means identity

    // Rejects empty parameter lists and degenerate sub-branches (angle 0,
    // rho 1) that would duplicate the original branch.
    void validate() const;

    std::vector<MobiusTransform> transforms() const;
};

struct FusionWeights {
    std::vector<double> w; // one weight in [0, 1] per fused branch
};

// SENet-style gating parameters: C -> C/r -> K with a rectifier between and
// a sigmoid at the output. Weights are loaded, never learned here.
struct GatingParams {
    int channels = 0;  // C
    int branches = 0;  // K, original branch included
    int reduction = 0; // r
    int hidden = 0;    // C/r
    std::vector<double> w1; // hidden x C, row-major
    std::vector<double> b1; // hidden
    std::vector<double> w2; // K x hidden, row-major
    std::vector<double> b2; // K

    // All-zero parameters; every gate evaluates to sigmoid(0) = 0.5.
    static GatingParams zeros(int channels, int branches, int reduction = 16);
    void validate() const;
};

GatingParams load_gating_params(const std::string& path);
void save_gating_params(const GatingParams& params, const std::string& path);

// transform -> branch op -> inverse transform per sub-branch, then the
// element-wise mean over sub-branches.
Grid run_branch(const Grid& fg, const BranchSpec& spec, Interp interp = Interp::Bilinear);

// Global average pool, two affine stages, sigmoid.
FusionWeights gate_weights(const Grid& fg, const GatingParams& params);

// Weighted channel concatenation: output block k = w_k * branches[k].
Grid saf_fuse(const std::vector<Grid>& branches, const FusionWeights& weights);

// branches = [fg] ++ run_branch(fg, spec) for each spec, gated and fused;
// output has (1 + specs.size()) * C channels.
Grid savt_forward(const Grid& fg, const std::vector<BranchSpec>& specs,
                  const GatingParams& gating, Interp interp = Interp::Bilinear);

// Table-default configuration: horizontal rotations every 30 degrees over
// (-180, 180] excluding 0, vertical rotations +30/-30, zoom factors
// {0.8, 1.2, 0.7, 1.3} about the south pole.
std::vector<BranchSpec> default_branch_specs();

struct SavtConfig {
    std::vector<BranchSpec> specs;
    std::string gating_file; // empty: zero parameters
    int gating_reduction = 16;
    Interp interp = Interp::Bilinear;
};

// Key=value configuration; see README for the accepted keys.
SavtConfig parse_savt_config(std::istream& in);
SavtConfig load_savt_config(const std::string& path);

} // namespace sphereview::fusion
