#include "sphereview/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sphereview/remap.hpp"

namespace sphereview::fusion {

namespace {

constexpr double kDegenerateTol = 1e-12;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_number(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": cannot parse number '" + s + "'");
    }
}

std::vector<double> parse_number_list(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& item : split(s, ','))
        if (!item.empty()) out.push_back(parse_number(item, what));
    return out;
}

UnitVector3 parse_center(const std::string& s, const char* what) {
    std::vector<double> v = parse_number_list(s, what);
    if (v.size() != 3)
        throw std::invalid_argument(std::string(what) + ": center needs three components");
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n < 1e-12)
        throw std::invalid_argument(std::string(what) + ": center must be nonzero");
    return {v[0] / n, v[1] / n, v[2] / n};
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

void BranchSpec::validate() const {
    if (kind == Kind::Zoom) {
        if (!angles.empty())
            throw std::invalid_argument("BranchSpec: zoom branch takes no angles");
        if (zooms.empty())
            throw std::invalid_argument("BranchSpec: zoom branch needs at least one factor");
        for (const ZoomParam& z : zooms) {
            if (!(z.rho > 0.0) || !std::isfinite(z.rho))
                throw std::invalid_argument("BranchSpec: zoom factor must be positive");
            if (std::abs(z.rho - 1.0) <= kDegenerateTol)
                throw std::invalid_argument(
                    "BranchSpec: zoom factor 1 duplicates the original branch");
        }
        return;
    }
    if (!zooms.empty())
        throw std::invalid_argument("BranchSpec: rotation branch takes no zoom factors");
    if (angles.empty())
        throw std::invalid_argument("BranchSpec: rotation branch needs at least one angle");
    for (double a : angles)
        if (std::abs(a) <= kDegenerateTol)
            throw std::invalid_argument("BranchSpec: angle 0 duplicates the original branch");
}

std::vector<MobiusTransform> BranchSpec::transforms() const {
    validate();
    std::vector<MobiusTransform> out;
    if (kind == Kind::Zoom) {
        for (const ZoomParam& z : zooms)
            out.push_back(MobiusTransform::zoom_about(z.center, z.rho));
    } else {
        UnitVector3 axis = kind == Kind::Horizontal ? UnitVector3{0.0, 0.0, 1.0}
                                                    : UnitVector3{0.0, 1.0, 0.0};
        for (double a : angles) out.push_back(MobiusTransform::rotation(axis, a));
    }
    return out;
}

Grid run_branch(const Grid& fg, const BranchSpec& spec, Interp interp) {
    std::vector<MobiusTransform> fs = spec.transforms();
    std::vector<double> acc(fg.data().size(), 0.0);
    for (const MobiusTransform& f : fs) {
        Grid t = transform_features(fg, f, interp);
        if (spec.op) {
            t = spec.op(t);
            if (!(t.dims() == fg.dims()) || t.channels() != fg.channels())
                throw std::invalid_argument("run_branch: branch op changed the grid shape");
        }
        Grid back = inverse_transform_features(t, f, interp);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += back.data()[i];
    }
    Grid out(fg.dims(), fg.channels());
    double inv_n = 1.0 / static_cast<double>(fs.size());
    for (size_t i = 0; i < acc.size(); ++i)
        out.data()[i] = static_cast<float>(acc[i] * inv_n);
    return out;
}

GatingParams GatingParams::zeros(int channels, int branches, int reduction) {
    GatingParams p;
    p.channels = channels;
    p.branches = branches;
    p.reduction = reduction;
    p.hidden = std::max(1, channels / std::max(reduction, 1));
    p.w1.assign(static_cast<size_t>(p.hidden) * channels, 0.0);
    p.b1.assign(p.hidden, 0.0);
    p.w2.assign(static_cast<size_t>(branches) * p.hidden, 0.0);
    p.b2.assign(branches, 0.0);
    p.validate();
    return p;
}

void GatingParams::validate() const {
    if (channels <= 0 || branches <= 0 || reduction <= 0 || hidden <= 0)
        throw std::invalid_argument("GatingParams: sizes must be positive");
    if (w1.size() != static_cast<size_t>(hidden) * channels || b1.size() != static_cast<size_t>(hidden) ||
        w2.size() != static_cast<size_t>(branches) * hidden || b2.size() != static_cast<size_t>(branches))
        throw std::invalid_argument("GatingParams: matrix sizes are inconsistent");
}

GatingParams load_gating_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gating file: " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "sphereview-gating" || version != "1")
        throw std::runtime_error("not a gating parameter file: " + path);
    GatingParams p;
    in >> p.channels >> p.branches >> p.reduction;
    if (!in) throw std::runtime_error("malformed gating header: " + path);
    if (p.channels <= 0 || p.reduction <= 0 || p.channels % p.reduction != 0)
        throw std::runtime_error("gating file: channels must be divisible by reduction");
    p.hidden = p.channels / p.reduction;
    auto read_block = [&](std::vector<double>& v, size_t count) {
        v.resize(count);
        for (size_t i = 0; i < count; ++i)
            if (!(in >> v[i])) throw std::runtime_error("gating file truncated: " + path);
    };
    read_block(p.w1, static_cast<size_t>(p.hidden) * p.channels);
    read_block(p.b1, p.hidden);
    read_block(p.w2, static_cast<size_t>(p.branches) * p.hidden);
    read_block(p.b2, p.branches);
    p.validate();
    return p;
}

void save_gating_params(const GatingParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write gating file: " + path);
    out << "sphereview-gating 1\n"
        << params.channels << " " << params.branches << " " << params.reduction << "\n";
    out.precision(17);
    auto write_block = [&](const std::vector<double>& v) {
        for (size_t i = 0; i < v.size(); ++i) out << v[i] << (i + 1 == v.size() ? "\n" : " ");
    };
    write_block(params.w1);
    write_block(params.b1);
    write_block(params.w2);
    write_block(params.b2);
    if (!out) throw std::runtime_error("failed writing gating file: " + path);
}

FusionWeights gate_weights(const Grid& fg, const GatingParams& params) {
    params.validate();
    if (params.channels != fg.channels())
        throw std::invalid_argument("gate_weights: channel count does not match parameters");

    std::vector<double> gap(fg.channels());
    double inv_n = 1.0 / static_cast<double>(fg.plane_size());
    for (int c = 0; c < fg.channels(); ++c) {
        double sum = 0.0;
        const float* p = fg.plane(c);
        for (size_t i = 0; i < fg.plane_size(); ++i) sum += p[i];
        gap[c] = sum * inv_n;
    }

    std::vector<double> hidden(params.hidden);
    for (int j = 0; j < params.hidden; ++j) {
        double acc = params.b1[j];
        for (int c = 0; c < params.channels; ++c)
            acc += params.w1[static_cast<size_t>(j) * params.channels + c] * gap[c];
        hidden[j] = acc > 0.0 ? acc : 0.0;
    }

    FusionWeights w;
    w.w.resize(params.branches);
    for (int k = 0; k < params.branches; ++k) {
        double acc = params.b2[k];
        for (int j = 0; j < params.hidden; ++j)
            acc += params.w2[static_cast<size_t>(k) * params.hidden + j] * hidden[j];
        w.w[k] = 1.0 / (1.0 + std::exp(-acc));
    }
    return w;
}

Grid saf_fuse(const std::vector<Grid>& branches, const FusionWeights& weights) {
    if (branches.empty()) throw std::invalid_argument("saf_fuse: no branches");
    if (branches.size() != weights.w.size())
        throw std::invalid_argument("saf_fuse: weight count does not match branch count");
    const GridDims& dims = branches[0].dims();
    int c = branches[0].channels();
    for (const Grid& b : branches)
        if (!(b.dims() == dims) || b.channels() != c)
            throw std::invalid_argument("saf_fuse: branch shapes differ");

    Grid out(dims, static_cast<int>(branches.size()) * c);
    size_t block = branches[0].data().size();
    for (size_t k = 0; k < branches.size(); ++k) {
        double wk = weights.w[k];
        const float* src = branches[k].data().data();
        float* dst = out.data().data() + k * block;
        for (size_t i = 0; i < block; ++i)
            dst[i] = static_cast<float>(wk * src[i]);
    }
    return out;
}

Grid savt_forward(const Grid& fg, const std::vector<BranchSpec>& specs,
                  const GatingParams& gating, Interp interp) {
    std::vector<Grid> branches;
    branches.reserve(1 + specs.size());
    branches.push_back(fg);
    for (const BranchSpec& spec : specs) branches.push_back(run_branch(fg, spec, interp));
    if (gating.branches != static_cast<int>(branches.size()))
        throw std::invalid_argument("savt_forward: gating branch count does not match specs");
    FusionWeights w = gate_weights(fg, gating);
    return saf_fuse(branches, w);
}

std::vector<BranchSpec> default_branch_specs() {
    BranchSpec hrb;
    hrb.kind = BranchSpec::Kind::Horizontal;
    for (int d = -150; d <= 180; d += 30)
        if (d != 0) hrb.angles.push_back(d * kDegToRad);

    BranchSpec vrb;
    vrb.kind = BranchSpec::Kind::Vertical;
    vrb.angles = {30.0 * kDegToRad, -30.0 * kDegToRad};

    BranchSpec zb;
    zb.kind = BranchSpec::Kind::Zoom;
    for (double rho : {0.8, 1.2, 0.7, 1.3}) zb.zooms.push_back({{0.0, 0.0, -1.0}, rho});

    return {hrb, vrb, zb};
}

namespace {

std::vector<double> step_degrees(double step) {
    if (!(step > 0.0) || step >= 360.0)
        throw std::invalid_argument("savt config: hrb.step_deg must lie in (0, 360)");
    std::vector<double> out;
    for (double a = step; a < 180.0; a += step) {
        out.push_back(-a);
        out.push_back(a);
    }
    if (std::fmod(180.0, step) == 0.0) out.push_back(180.0);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

SavtConfig parse_savt_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("savt config: expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument("savt config: duplicate key '" + key + "'");
    }

    static const char* known[] = {"hrb.degrees", "hrb.step_deg", "vrb.degrees", "zb.factors",
                                  "zb.centers", "gating.file", "gating.reduction", "interp"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("savt config: unknown key '" + key + "'");
    }

    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    SavtConfig cfg;
    std::vector<BranchSpec> defaults = default_branch_specs();

    BranchSpec hrb = defaults[0];
    if (get("hrb.degrees") && get("hrb.step_deg"))
        throw std::invalid_argument("savt config: hrb.degrees and hrb.step_deg are exclusive");
    if (const std::string* v = get("hrb.step_deg")) {
        hrb.angles.clear();
        for (double d : step_degrees(parse_number(*v, "hrb.step_deg")))
            hrb.angles.push_back(d * kDegToRad);
    } else if (const std::string* v = get("hrb.degrees")) {
        hrb.angles.clear();
        if (*v != "none")
            for (double d : parse_number_list(*v, "hrb.degrees"))
                hrb.angles.push_back(d * kDegToRad);
    }
    if (!hrb.angles.empty()) cfg.specs.push_back(hrb);

    BranchSpec vrb = defaults[1];
    if (const std::string* v = get("vrb.degrees")) {
        vrb.angles.clear();
        if (*v != "none")
            for (double d : parse_number_list(*v, "vrb.degrees"))
                vrb.angles.push_back(d * kDegToRad);
    }
    if (!vrb.angles.empty()) cfg.specs.push_back(vrb);

    BranchSpec zb = defaults[2];
    if (const std::string* v = get("zb.factors")) {
        zb.zooms.clear();
        if (*v != "none") {
            std::vector<double> factors = parse_number_list(*v, "zb.factors");
            std::vector<UnitVector3> centers{{0.0, 0.0, -1.0}};
            if (const std::string* cs = get("zb.centers")) {
                centers.clear();
                for (const std::string& triple : split(*cs, ';'))
                    if (!triple.empty()) centers.push_back(parse_center(triple, "zb.centers"));
            }
            if (centers.size() != 1 && centers.size() != factors.size())
                throw std::invalid_argument(
                    "savt config: zb.centers must hold one center or one per factor");
            for (size_t i = 0; i < factors.size(); ++i)
                zb.zooms.push_back({centers.size() == 1 ? centers[0] : centers[i], factors[i]});
        }
    } else if (get("zb.centers")) {
        std::vector<UnitVector3> centers;
        for (const std::string& triple : split(*get("zb.centers"), ';'))
            if (!triple.empty()) centers.push_back(parse_center(triple, "zb.centers"));
        if (centers.size() == 1) {
            for (ZoomParam& z : zb.zooms) z.center = centers[0];
        } else if (centers.size() == zb.zooms.size()) {
            for (size_t i = 0; i < centers.size(); ++i) zb.zooms[i].center = centers[i];
        } else {
            throw std::invalid_argument(
                "savt config: zb.centers must hold one center or one per factor");
        }
    }
    if (!zb.zooms.empty()) cfg.specs.push_back(zb);

    if (const std::string* v = get("gating.file")) cfg.gating_file = *v;
    if (const std::string* v = get("gating.reduction")) {
        double r = parse_number(*v, "gating.reduction");
        cfg.gating_reduction = static_cast<int>(r);
        if (cfg.gating_reduction <= 0 || r != cfg.gating_reduction)
            throw std::invalid_argument("savt config: gating.reduction must be a positive integer");
    }
    if (const std::string* v = get("interp")) {
        if (*v == "nearest")
            cfg.interp = Interp::Nearest;
        else if (*v == "bilinear")
            cfg.interp = Interp::Bilinear;
        else
            throw std::invalid_argument("savt config: interp must be nearest or bilinear");
    }

    for (const BranchSpec& spec : cfg.specs) spec.validate();
    return cfg;
}

SavtConfig load_savt_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open savt config: " + path);
    return parse_savt_config(in);
}

} // namespace sphereview::fusion
