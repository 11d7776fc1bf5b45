#include "steps.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphereview::cli {

namespace {

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double parse_double(const std::string& text, const std::string& flag) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(flag + ": expected a number, got '" + text + "'");
    }
}

std::vector<double> parse_tuple(const std::string& text, size_t n, const std::string& flag) {
    std::vector<double> vals;
    size_t pos = 0;
    while (vals.size() < n) {
        const size_t comma = text.find(',', pos);
        const bool last = vals.size() + 1 == n;
        if (last != (comma == std::string::npos)) break;
        vals.push_back(parse_double(text.substr(pos, comma - pos), flag));
        pos = comma == std::string::npos ? text.size() : comma + 1;
    }
    if (vals.size() != n)
        throw std::runtime_error(flag + ": expected " + std::to_string(n) +
                                 " comma-separated numbers, got '" + text + "'");
    return vals;
}

UnitVector3 parse_axis(const std::vector<double>& v, const std::string& flag) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::runtime_error(flag + ": axis must be a nonzero vector");
    return {v[0] / norm, v[1] / norm, v[2] / norm};
}

// Matches "--flag value" and "--flag=value"; fills `value` and advances i past
// the consumed tokens.
bool match_valued(const std::vector<std::string>& args, size_t& i, const std::string& flag,
                  std::string& value) {
    const std::string& tok = args[i];
    if (tok == flag) {
        if (i + 1 >= args.size()) throw std::runtime_error(flag + ": missing value");
        value = args[i + 1];
        i += 2;
        return true;
    }
    if (tok.size() > flag.size() + 1 && tok.compare(0, flag.size(), flag) == 0 &&
        tok[flag.size()] == '=') {
        value = tok.substr(flag.size() + 1);
        i += 1;
        return true;
    }
    return false;
}

} // namespace

std::vector<std::string> extract_steps(const std::vector<std::string>& args,
                                       std::vector<TransformStep>& steps) {
    std::vector<std::string> rest;
    size_t i = 0;
    while (i < args.size()) {
        std::string value;
        if (args[i] == "--then") {
            if (steps.empty()) throw std::runtime_error("--then: no step precedes it");
            ++i;
        } else if (match_valued(args, i, "--rotate-h", value)) {
            steps.push_back({TransformStep::Kind::RotateH, to_rad(parse_double(value, "--rotate-h")),
                             {0.0, 0.0, 1.0}, 1.0, {0.0, 0.0, -1.0}});
        } else if (match_valued(args, i, "--rotate-v", value)) {
            steps.push_back({TransformStep::Kind::RotateV, to_rad(parse_double(value, "--rotate-v")),
                             {0.0, 1.0, 0.0}, 1.0, {0.0, 0.0, -1.0}});
        } else if (match_valued(args, i, "--rotate", value)) {
            const auto v = parse_tuple(value, 4, "--rotate");
            steps.push_back({TransformStep::Kind::RotateAxis, to_rad(v[3]),
                             parse_axis({v.begin(), v.begin() + 3}, "--rotate"), 1.0,
                             {0.0, 0.0, -1.0}});
        } else if (match_valued(args, i, "--zoom", value)) {
            const double rho = parse_double(value, "--zoom");
            if (!(rho > 0.0) || !std::isfinite(rho))
                throw std::runtime_error("--zoom: factor must be positive and finite");
            steps.push_back(
                {TransformStep::Kind::Zoom, 0.0, {0.0, 0.0, 1.0}, rho, {0.0, 0.0, -1.0}});
        } else if (match_valued(args, i, "--center", value)) {
            if (steps.empty() || steps.back().kind != TransformStep::Kind::Zoom)
                throw std::runtime_error("--center: must directly follow a --zoom step");
            steps.back().center = parse_axis(parse_tuple(value, 3, "--center"), "--center");
        } else {
            rest.push_back(args[i]);
            ++i;
        }
    }
    return rest;
}

MobiusTransform compose_steps(const std::vector<TransformStep>& steps) {
    MobiusTransform total = MobiusTransform::identity();
    for (const TransformStep& s : steps) {
        MobiusTransform f = MobiusTransform::identity();
        switch (s.kind) {
        case TransformStep::Kind::RotateH:
        case TransformStep::Kind::RotateV:
        case TransformStep::Kind::RotateAxis:
            f = MobiusTransform::rotation(s.axis, s.angle_rad);
            break;
        case TransformStep::Kind::Zoom:
            f = MobiusTransform::zoom_about(s.center, s.rho);
            break;
        }
        total = compose(f, total);
    }
    return total;
}

} // namespace sphereview::cli
