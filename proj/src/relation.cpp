#include "eips/relation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "eips/error.hpp"

namespace eips {
namespace {

void require_grid(const std::vector<double>& g, const char* what) {
    if (g.size() < 2) throw Error(ErrorCode::kInvalidInput, std::string(what) + " needs at least 2 points");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) throw Error(ErrorCode::kInvalidInput, std::string(what) + " is not finite");
    }
}

std::vector<double> scaled(const std::vector<double>& g, double s) {
    std::vector<double> out(g.size());
    std::transform(g.begin(), g.end(), out.begin(), [s](double v) { return v * s; });
    return out;
}

struct Branch {
    std::vector<double> x;
    std::vector<double> v;
};

Branch single_valued_branch(const PlanarRelation& k, IntegralOf which) {
    const auto pts = k.samples();
    Branch raw;
    raw.x.reserve(pts.size());
    raw.v.reserve(pts.size());
    for (const auto& p : pts) {
        raw.x.push_back(which == IntegralOf::kK ? p.x() : p.y());
        raw.v.push_back(which == IntegralOf::kK ? p.y() : p.x());
    }
    if (k.kind() == RelationKind::kSampled) {
        std::vector<std::size_t> idx(raw.x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return raw.x[i] < raw.x[j]; });
        Branch sorted;
        for (auto i : idx) {
            sorted.x.push_back(raw.x[i]);
            sorted.v.push_back(raw.v[i]);
        }
        raw = std::move(sorted);
    }
    double scale = 1.0;
    for (double x : raw.x) scale = std::max(scale, std::abs(x));
    const double tie = 1e-12 * scale;

    Branch merged;
    for (std::size_t i = 0; i < raw.x.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < raw.x.size() && std::abs(raw.x[j] - raw.x[i]) <= tie) sum += raw.v[j++];
        merged.x.push_back(raw.x[i]);
        merged.v.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    if (merged.x.size() < 2) {
        throw Error(ErrorCode::kMultiValued, "relation branch collapses to a single abscissa");
    }
    const bool increasing = merged.x[1] > merged.x[0];
    for (std::size_t i = 1; i < merged.x.size(); ++i) {
        if ((merged.x[i] > merged.x[i - 1]) != increasing) {
            throw Error(ErrorCode::kMultiValued, "abscissa folds back near " + std::to_string(merged.x[i]));
        }
    }
    if (!increasing) {
        std::reverse(merged.x.begin(), merged.x.end());
        std::reverse(merged.v.begin(), merged.v.end());
    }
    return merged;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& v, double at) {
    auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double t = (at - x[i]) / (x[i + 1] - x[i]);
    return v[i] + t * (v[i + 1] - v[i]);
}

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Follow the half cell with the larger chord; a genuine jump keeps its size.
double residual_jump(const ParamCurve& c, double lo, double hi) {
    auto at = [&](double s) { return Point2(c.u_of(s), c.y_of(s)); };
    Point2 plo = at(lo), phi = at(hi);
    for (int level = 0; level < 48; ++level) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Point2 pm = at(mid);
        if ((pm - plo).norm() >= (phi - pm).norm()) {
            hi = mid;
            phi = pm;
        } else {
            lo = mid;
            plo = pm;
        }
    }
    return (phi - plo).norm();
}

struct CellKey {
    long long x, y;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL);
    }
};

double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0));
}

double segment_pair_distance(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    if (segments_cross(a, b, c, d)) return 0.0;
    return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                     segment_distance(d, a, b)});
}

// Pairs of non-adjacent segments closer than factor times the shorter step.
std::size_t self_intersections(const std::vector<Point2>& pts, double factor) {
    const std::size_t n = pts.size();
    const std::size_t m = n - 1;
    std::vector<double> step(m);
    for (std::size_t i = 0; i < m; ++i) step[i] = (pts[i + 1] - pts[i]).norm();
    std::vector<double> positive;
    for (double s : step) {
        if (s > 0.0) positive.push_back(s);
    }
    double cell = 1.0;
    if (!positive.empty()) {
        std::nth_element(positive.begin(), positive.begin() + positive.size() / 2, positive.end());
        cell = positive[positive.size() / 2];
    }
    auto key_of = [cell](double x, double y) {
        return CellKey{static_cast<long long>(std::floor(x / cell)),
                       static_cast<long long>(std::floor(y / cell))};
    };
    auto box = [&](std::size_t j, double pad) {
        const Point2& a = pts[j];
        const Point2& b = pts[j + 1];
        return std::pair{key_of(std::min(a.x(), b.x()) - pad, std::min(a.y(), b.y()) - pad),
                         key_of(std::max(a.x(), b.x()) + pad, std::max(a.y(), b.y()) + pad)};
    };
    auto cells = [](const CellKey& lo, const CellKey& hi) { return (hi.x - lo.x + 1) * (hi.y - lo.y + 1); };
    constexpr long long kMaxCells = 4096;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
    std::vector<std::size_t> oversized;
    for (std::size_t j = 0; j < m; ++j) {
        const auto [lo, hi] = box(j, factor * step[j]);
        if (cells(lo, hi) > kMaxCells) {
            oversized.push_back(j);
            continue;
        }
        for (long long cx = lo.x; cx <= hi.x; ++cx) {
            for (long long cy = lo.y; cy <= hi.y; ++cy) grid[{cx, cy}].push_back(j);
        }
    }
    std::vector<std::size_t> stamp(m, m);
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto test = [&](std::size_t j) {
            if (j <= i + 1 || stamp[j] == i) return;
            stamp[j] = i;
            const double tol = factor * std::min(step[i], step[j]);
            if (segment_pair_distance(pts[i], pts[i + 1], pts[j], pts[j + 1]) <= tol) ++count;
        };
        for (std::size_t j : oversized) test(j);
        const auto [lo, hi] = box(i, factor * step[i]);
        if (cells(lo, hi) > kMaxCells) {
            for (std::size_t j = i + 2; j < m; ++j) test(j);
            continue;
        }
        for (long long cx = lo.x; cx <= hi.x; ++cx) {
            for (long long cy = lo.y; cy <= hi.y; ++cy) {
                auto it = grid.find({cx, cy});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) test(j);
            }
        }
    }
    return count;
}

bool diverges(const std::vector<Point2>& pts, bool toward_high, double tail_fraction, double growth) {
    const std::size_t n = pts.size();
    const std::size_t center = n / 2;
    auto radius = [&](std::size_t i) { return (pts[i] - pts[center]).norm(); };
    const std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
    if (m >= center) return false;
    auto index = [&](std::size_t k) { return toward_high ? n - m + k : m - 1 - k; };
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double r0 = radius(index(k)), r1 = radius(index(k + 1));
        if (r1 < r0 * (1.0 - 1e-12)) return false;
    }
    const std::size_t end = toward_high ? n - 1 : 0;
    const std::size_t half = toward_high ? (center + n - 1) / 2 : center / 2;
    return radius(end) > 0.0 && radius(end) >= growth * radius(half);
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::kInvalidInput, "linspace needs at least 2 points");
    std::vector<double> out(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + h * static_cast<double>(i);
    out.back() = hi;
    return out;
}

PlanarRelation PlanarRelation::param_curve(std::vector<double> sigma, ScalarMap u_of, ScalarMap y_of,
                                           bool unbounded_low, bool unbounded_high) {
    require_grid(sigma, "parameter grid");
    if (!u_of || !y_of) throw Error(ErrorCode::kInvalidInput, "parametric maps are empty");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (i > 0 && !(sigma[i] > sigma[i - 1])) {
            throw Error(ErrorCode::kInvalidInput, "parameter grid must be strictly increasing");
        }
        if (!std::isfinite(u_of(sigma[i])) || !std::isfinite(y_of(sigma[i]))) {
            throw Error(ErrorCode::kInvalidInput, "parametric maps not finite at sigma = " + std::to_string(sigma[i]));
        }
    }
    return PlanarRelation(ParamCurve{std::move(sigma), std::move(u_of), std::move(y_of), unbounded_low,
                                     unbounded_high});
}

PlanarRelation PlanarRelation::sampled(std::vector<Point2> points) {
    std::vector<Point2> kept;
    double scale = 1.0;
    for (const auto& p : points) {
        if (!p.allFinite()) throw Error(ErrorCode::kInvalidInput, "sampled relation has non-finite point");
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    for (const auto& p : points) {
        const bool dup = std::any_of(kept.begin(), kept.end(),
                                     [&](const Point2& q) { return (p - q).cwiseAbs().maxCoeff() <= 1e-12 * scale; });
        if (!dup) kept.push_back(p);
    }
    if (kept.empty()) throw Error(ErrorCode::kInvalidInput, "sampled relation is empty");
    return PlanarRelation(SampledRelation{std::move(kept)});
}

PlanarRelation PlanarRelation::closed_form(ScalarMap map, MapDirection direction, std::vector<double> grid) {
    require_grid(grid, "closed-form grid");
    if (!map) throw Error(ErrorCode::kInvalidInput, "closed-form map is empty");
    for (double g : grid) {
        if (!std::isfinite(map(g))) {
            throw Error(ErrorCode::kInvalidInput, "closed-form map not finite at " + std::to_string(g));
        }
    }
    return PlanarRelation(ClosedFormRelation{std::move(map), direction, std::move(grid)});
}

RelationKind PlanarRelation::kind() const { return static_cast<RelationKind>(rep_.index()); }

std::string_view kind_name(RelationKind k) noexcept {
    switch (k) {
        case RelationKind::kParamCurve: return "param_curve";
        case RelationKind::kSampled: return "sampled";
        case RelationKind::kClosedForm: return "closed_form";
    }
    return "unknown";
}

std::vector<Point2> PlanarRelation::samples() const {
    std::vector<Point2> out;
    if (const auto* c = std::get_if<ParamCurve>(&rep_)) {
        out.reserve(c->sigma.size());
        for (double s : c->sigma) out.emplace_back(c->u_of(s), c->y_of(s));
    } else if (const auto* s = std::get_if<SampledRelation>(&rep_)) {
        out = s->points;
    } else {
        const auto& f = std::get<ClosedFormRelation>(rep_);
        out.reserve(f.grid.size());
        for (double g : f.grid) {
            if (f.direction == MapDirection::kInputToOutput) {
                out.emplace_back(g, f.map(g));
            } else {
                out.emplace_back(f.map(g), g);
            }
        }
    }
    return out;
}

PlanarRelation PlanarRelation::inverse() const {
    if (const auto* c = std::get_if<ParamCurve>(&rep_)) {
        return PlanarRelation(ParamCurve{c->sigma, c->y_of, c->u_of, c->unbounded_low, c->unbounded_high});
    }
    if (const auto* s = std::get_if<SampledRelation>(&rep_)) {
        SampledRelation r;
        for (const auto& p : s->points) r.points.emplace_back(p.y(), p.x());
        return PlanarRelation(std::move(r));
    }
    auto f = std::get<ClosedFormRelation>(rep_);
    f.direction = f.direction == MapDirection::kInputToOutput ? MapDirection::kOutputToInput
                                                               : MapDirection::kInputToOutput;
    return PlanarRelation(std::move(f));
}

PlanarRelation transform_relation(const PlanarRelation& k, const Transform2& t) {
    require_invertible(t);
    if (const auto* s = std::get_if<SampledRelation>(&k.rep())) {
        std::vector<Point2> pts;
        pts.reserve(s->points.size());
        for (const auto& p : s->points) pts.push_back(t.apply(p));
        return PlanarRelation::sampled(std::move(pts));
    }
    ScalarMap u_of, y_of;
    std::vector<double> sigma;
    bool lo = true, hi = true;
    if (const auto* c = std::get_if<ParamCurve>(&k.rep())) {
        u_of = c->u_of;
        y_of = c->y_of;
        sigma = c->sigma;
        lo = c->unbounded_low;
        hi = c->unbounded_high;
    } else {
        const auto& f = std::get<ClosedFormRelation>(k.rep());
        ScalarMap identity = [](double s) { return s; };
        if (f.direction == MapDirection::kInputToOutput) {
            u_of = identity;
            y_of = f.map;
        } else {
            u_of = f.map;
            y_of = identity;
        }
        sigma = f.grid;
        if (sigma.front() > sigma.back()) {
            // keep point order: parametrise by the negated free variable
            for (double& s : sigma) s = -s;
            u_of = [g = u_of](double s) { return g(-s); };
            y_of = [g = y_of](double s) { return g(-s); };
        }
    }
    return PlanarRelation::param_curve(
        std::move(sigma), [t, u_of, y_of](double s) { return t.a * u_of(s) + t.b * y_of(s); },
        [t, u_of, y_of](double s) { return t.c * u_of(s) + t.d * y_of(s); }, lo, hi);
}

PlanarRelation apply_stage(const PlanarRelation& k, Stage stage, double delta) {
    Transform2 t;
    switch (stage) {
        case Stage::kOutputFeedback: t = {1.0, delta, 0.0, 1.0}; break;
        case Stage::kPostGain: t = {1.0, 0.0, 0.0, delta}; break;
        case Stage::kInputFeedthrough: t = {1.0, 0.0, delta, 1.0}; break;
        case Stage::kPreGain: t = {delta, 0.0, 0.0, 1.0}; break;
    }
    const auto* f = std::get_if<ClosedFormRelation>(&k.rep());
    if (f == nullptr) return transform_relation(k, t);
    const ScalarMap g = f->map;
    const bool forward = f->direction == MapDirection::kInputToOutput;
    switch (stage) {
        case Stage::kOutputFeedback:
            if (!forward) {
                return PlanarRelation::closed_form([g, delta](double y) { return g(y) + delta * y; },
                                                   MapDirection::kOutputToInput, f->grid);
            }
            break;
        case Stage::kPostGain:
            if (delta == 0.0) break;
            if (forward) {
                return PlanarRelation::closed_form([g, delta](double u) { return delta * g(u); },
                                                   MapDirection::kInputToOutput, f->grid);
            }
            return PlanarRelation::closed_form([g, delta](double y) { return g(y / delta); },
                                               MapDirection::kOutputToInput, scaled(f->grid, delta));
        case Stage::kInputFeedthrough:
            if (forward) {
                return PlanarRelation::closed_form([g, delta](double u) { return g(u) + delta * u; },
                                                   MapDirection::kInputToOutput, f->grid);
            }
            break;
        case Stage::kPreGain:
            if (delta == 0.0) break;
            if (forward) {
                return PlanarRelation::closed_form([g, delta](double u) { return g(u / delta); },
                                                   MapDirection::kInputToOutput, scaled(f->grid, delta));
            }
            return PlanarRelation::closed_form([g, delta](double y) { return delta * g(y); },
                                               MapDirection::kOutputToInput, f->grid);
    }
    return transform_relation(k, t);
}

PlanarRelation compose_via_stages(const PlanarRelation& k, const ElementaryDecomposition& e) {
    PlanarRelation r = e.column_swapped ? k.inverse() : k;
    for (const auto& [stage, delta] : e.stages()) r = apply_stage(r, stage, delta);
    return r;
}

double IntegralFunction::value(double x) const {
    if (x <= grid.front()) return values.front() + derivatives.front() * (x - grid.front());
    if (x >= grid.back()) return values.back() + derivatives.back() * (x - grid.back());
    return interpolate(grid, values, x);
}

double IntegralFunction::derivative(double x) const {
    if (x <= grid.front()) return derivatives.front();
    if (x >= grid.back()) return derivatives.back();
    return interpolate(grid, derivatives, x);
}

bool convexity_certificate(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() < 3) return true;
    double vmax = 0.0, hmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vmax = std::max(vmax, std::abs(values[i]));
        if (i > 0) hmin = std::min(hmin, grid[i] - grid[i - 1]);
    }
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * vmax / hmin;
    double prev = (values[1] - values[0]) / (grid[1] - grid[0]);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double slope = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
        if (slope < prev - tol) return false;
        prev = slope;
    }
    return true;
}

IntegralFunction integral_function(const PlanarRelation& k, IntegralOf which, const std::vector<double>* grid) {
    Branch b = single_valued_branch(k, which);
    if (grid != nullptr) {
        const double lo = b.x.front(), hi = b.x.back();
        const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
        Branch r;
        for (double g : *grid) {
            if (g < lo - slack || g > hi + slack) continue;
            if (!r.x.empty() && !(g > r.x.back())) {
                throw Error(ErrorCode::kInvalidInput, "integration grid must be strictly increasing");
            }
            r.x.push_back(g);
            r.v.push_back(interpolate(b.x, b.v, std::clamp(g, lo, hi)));
        }
        if (r.x.size() < 2) throw Error(ErrorCode::kInvalidInput, "integration grid misses the relation's range");
        b = std::move(r);
    }
    IntegralFunction f;
    f.grid = b.x;
    f.derivatives = b.v;
    f.values.assign(b.x.size(), 0.0);
    for (std::size_t i = 1; i < b.x.size(); ++i) {
        f.values[i] = f.values[i - 1] + 0.5 * (b.v[i] + b.v[i - 1]) * (b.x[i] - b.x[i - 1]);
    }
    f.convex = convexity_certificate(f.grid, f.values);
    return f;
}

IntegralFunction legendre(const IntegralFunction& f, const std::vector<double>& dual_grid) {
    require_grid(dual_grid, "dual grid");
    IntegralFunction out;
    out.grid = dual_grid;
    out.values.resize(dual_grid.size());
    out.derivatives.resize(dual_grid.size());
    for (std::size_t j = 0; j < dual_grid.size(); ++j) {
        if (j > 0 && !(dual_grid[j] > dual_grid[j - 1])) {
            throw Error(ErrorCode::kInvalidInput, "dual grid must be strictly increasing");
        }
        const double y = dual_grid[j];
        double best = -std::numeric_limits<double>::infinity();
        double arg = f.grid.front();
        for (std::size_t i = 0; i < f.grid.size(); ++i) {
            const double v = f.grid[i] * y - (f.values[i] + f.anchor);
            if (v > best) {
                best = v;
                arg = f.grid[i];
            }
        }
        out.values[j] = best;
        out.derivatives[j] = arg;
    }
    out.anchor = out.values.front();
    for (double& v : out.values) v -= out.anchor;
    out.convex = convexity_certificate(out.grid, out.values);
    return out;
}

bool is_monotone(const PlanarRelation& k, bool strict, double tol) {
    auto pts = k.samples();
    std::sort(pts.begin(), pts.end(), [](const Point2& p, const Point2& q) {
        return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
    });
    double scale = 1.0;
    for (const auto& p : pts) scale = std::max(scale, std::abs(p.y()));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dy = pts[i + 1].y() - pts[i].y();
        if (dy < -tol * scale) return false;
        if (strict && pts[i + 1].x() > pts[i].x() && !(dy > 0.0)) return false;
    }
    return true;
}

CursivityReport is_cursive(const PlanarRelation& k, const CursivityOptions& opts,
                           const std::optional<InputAffineFlags>& flags) {
    const auto* c = k.as_param_curve();
    if (c == nullptr) {
        throw Error(ErrorCode::kWrongRepresentation, "cursiveness needs a parametric curve");
    }
    const auto pts = k.samples();
    const std::size_t n = pts.size();
    CursivityReport r;

    std::vector<double> step(n - 1);
    double scale = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) step[i] = (pts[i + 1] - pts[i]).norm();
    for (const auto& p : pts) scale = std::max(scale, p.norm());
    r.continuous = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double neighbour = 0.0;
        if (i > 0) neighbour = std::max(neighbour, step[i - 1]);
        if (i + 2 < n) neighbour = std::max(neighbour, step[i + 1]);
        const double ratio = neighbour > 0.0 ? step[i] / neighbour : (step[i] > 0.0 ? INFINITY : 0.0);
        r.max_jump_ratio = std::max(r.max_jump_ratio, ratio);
        if (step[i] > opts.jump_ratio * neighbour + 1e-12 * scale) {
            const double rest = residual_jump(*c, c->sigma[i], c->sigma[i + 1]);
            if (rest > 1e-6 * step[i]) r.continuous = false;
        }
    }
    r.diverges_low = c->unbounded_low && diverges(pts, false, opts.tail_fraction, opts.growth_factor);
    r.diverges_high = c->unbounded_high && diverges(pts, true, opts.tail_fraction, opts.growth_factor);
    r.self_intersections = self_intersections(pts, opts.self_distance_factor);
    r.non_self_intersecting = r.self_intersections == 0;
    if (flags) {
        r.input_affine_condition = flags->dynamics_affine_in_input && flags->output_independent_of_input &&
                                   flags->input_determined_by_state;
    }
    return r;
}

MaximalMonotoneReport is_maximal_monotone(const PlanarRelation& k) {
    MaximalMonotoneReport r;
    r.monotone = is_monotone(k);
    r.cursivity = is_cursive(k);
    return r;
}

}  // namespace eips
