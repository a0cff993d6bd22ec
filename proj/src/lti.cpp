#include "eips/lti.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>

#include "eips/error.hpp"

namespace eips {
namespace {

using cd = std::complex<double>;

void trim(std::vector<double>& c) {
    double big = 0.0;
    for (double v : c) big = std::max(big, std::abs(v));
    while (!c.empty() && std::abs(c.back()) <= 1e-14 * big) c.pop_back();
    if (big == 0.0) c.clear();
}

bool poles_stable(const Polynomial& q) { return q.degree() < 1 || is_stable(q); }

// Golden-section search on log(w) for the maximum of f inside [lo, hi].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo), b = std::log(hi);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int k = 0; k < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++k) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(std::exp(x1));
        }
    }
    return f1 > f2 ? std::pair{std::exp(x1), f1} : std::pair{std::exp(x2), f2};
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> w(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) w[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return w;
}

// Supremum over w >= 0 of f: dense log sweep widened while the extremum sits on
// the band edge, then refinement of every sampled local maximum.
double sweep_sup(const std::function<double(double)>& f) {
    auto safe = [&](double w) {
        const double v = f(w);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    double lo = 1e-4, hi = 1e4;
    std::vector<double> w = logspace(lo, hi, 10000);
    std::vector<double> v(w.size());
    std::transform(w.begin(), w.end(), v.begin(), safe);
    for (int guard = 0; guard < 4; ++guard) {
        const auto best = std::max_element(v.begin(), v.end()) - v.begin();
        if (best + 1 == static_cast<long>(v.size()) && hi < 1e12) {
            const auto extra = logspace(hi, hi * 1e2, 500);
            hi *= 1e2;
            for (std::size_t i = 1; i < extra.size(); ++i) {
                w.push_back(extra[i]);
                v.push_back(safe(extra[i]));
            }
        } else if (best == 0 && lo > 1e-12) {
            auto extra = logspace(lo * 1e-2, lo, 500);
            lo *= 1e-2;
            extra.pop_back();
            std::vector<double> ev(extra.size());
            std::transform(extra.begin(), extra.end(), ev.begin(), safe);
            w.insert(w.begin(), extra.begin(), extra.end());
            v.insert(v.begin(), ev.begin(), ev.end());
        } else {
            break;
        }
    }
    double sup = std::max(safe(0.0), *std::max_element(v.begin(), v.end()));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) sup = std::max(sup, golden_max(safe, w[i - 1], w[i + 1]).second);
    }
    return sup;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
    for (double v : c_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidInput, "polynomial coefficient is not finite");
    }
    trim(c_);
}

Polynomial Polynomial::from_roots(const std::vector<cd>& roots, double leading) {
    std::vector<cd> c{leading};
    for (const cd& r : roots) {
        std::vector<cd> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> re(c.size());
    std::transform(c.begin(), c.end(), re.begin(), [](cd z) { return z.real(); });
    return Polynomial(std::move(re));
}

cd Polynomial::operator()(cd s) const {
    cd acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

std::vector<cd> Polynomial::roots() const {
    const int n = degree();
    if (n < 1) throw Error(ErrorCode::kDegenerateDegree, "polynomial has no roots (degree < 1)");
    if (n == 1) return {cd(-c_[0] / c_[1], 0.0)};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[i] / c_[n];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<cd> out(n);
    for (int i = 0; i < n; ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
    std::vector<double> c(std::max(p.c_.size(), q.c_.size()), 0.0);
    for (std::size_t i = 0; i < p.c_.size(); ++i) c[i] += p.c_[i];
    for (std::size_t i = 0; i < q.c_.size(); ++i) c[i] += q.c_[i];
    return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& p) {
    std::vector<double> c(p.c_);
    for (double& v : c) v *= k;
    return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    if (p.is_zero() || q.is_zero()) return {};
    std::vector<double> c(p.c_.size() + q.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.c_.size(); ++i) {
        for (std::size_t j = 0; j < q.c_.size(); ++j) c[i + j] += p.c_[i] * q.c_[j];
    }
    return Polynomial(std::move(c));
}

RationalTF::RationalTF(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw Error(ErrorCode::kInvalidInput, "transfer function denominator is zero");
    if (num.degree() > den.degree()) {
        throw Error(ErrorCode::kInvalidInput, "transfer function is improper (deg num > deg den)");
    }
}

double RationalTF::at_infinity() const {
    return num.degree() == den.degree() ? num.leading() / den.leading() : 0.0;
}

bool is_stable(const Polynomial& q) {
    const auto r = q.roots();
    return std::all_of(r.begin(), r.end(), [](cd z) { return z.real() < -1e-9; });
}

Cancellation cancel_common_roots(const RationalTF& g, double tol) {
    if (g.num.degree() < 1 || g.den.degree() < 1) return {g, 0};
    auto zn = g.num.roots();
    auto zd = g.den.roots();
    std::size_t cancelled = 0;
    for (std::size_t i = 0; i < zn.size();) {
        auto hit = std::find_if(zd.begin(), zd.end(), [&](cd z) { return std::abs(z - zn[i]) <= tol; });
        if (hit == zd.end()) {
            ++i;
            continue;
        }
        zd.erase(hit);
        zn.erase(zn.begin() + static_cast<long>(i));
        ++cancelled;
    }
    if (cancelled == 0) return {g, 0};
    return {RationalTF(Polynomial::from_roots(zn, g.num.leading()), Polynomial::from_roots(zd, g.den.leading())),
            cancelled};
}

double linf_norm(const RationalTF& g) {
    if (!poles_stable(g.den)) throw Error(ErrorCode::kUnstableDenominator, "denominator is not stable");
    const double sup = sweep_sup([&](double w) { return std::abs(g(cd(0.0, w))); });
    return std::max(sup, std::abs(g.at_infinity()));
}

EipsIndices eips_indices(const RationalTF& g, double lambda, MuBound bound) {
    const Polynomial closed = g.den + lambda * g.num;
    if (closed.degree() < g.den.degree()) {
        throw Error(ErrorCode::kDegreeDrop, "q + lambda p loses degree at lambda = " + std::to_string(lambda));
    }
    if (!poles_stable(closed)) {
        throw Error(ErrorCode::kDestabilizingLambda, "q + lambda p is not stable at lambda = " + std::to_string(lambda));
    }
    EipsIndices out;
    out.lambda = lambda;
    out.kappa = linf_norm(RationalTF(g.num, closed));
    if (bound == MuBound::kLinearGain) {
        if (out.kappa > 1.0) {
            throw Error(ErrorCode::kInvalidInput, "linear gain bound needs kappa <= 1");
        }
        out.mu = out.kappa + 0.25;
    } else {
        out.mu = out.kappa * out.kappa + 0.25;
    }
    const double s = 1.0 + 2.0 * lambda * out.mu;
    if (s <= 1e-12) {
        throw Error(ErrorCode::kSingularDenominator,
                    "1 + 2 lambda mu = " + std::to_string(s) + " is not positive");
    }
    out.indices.rho = -lambda * (1.0 + lambda * out.mu) / s;
    out.indices.nu = -out.mu / s;
    return out;
}

EipsIndices lambda_search(const RationalTF& g, const std::vector<double>& grid, MuBound bound) {
    std::optional<EipsIndices> best;
    for (double lambda : grid) {
        if (!std::isfinite(lambda)) throw Error(ErrorCode::kInvalidInput, "lambda grid is not finite");
        try {
            const EipsIndices e = eips_indices(g, lambda, bound);
            if (!best || e.mu < best->mu) best = e;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kInvalidInput) continue;
            if (e.code() != ErrorCode::kDegreeDrop && e.code() != ErrorCode::kDestabilizingLambda &&
                e.code() != ErrorCode::kSingularDenominator) {
                throw;
            }
        }
    }
    if (!best) throw Error(ErrorCode::kNoStabilizingLambda, "no grid value of lambda is admissible");
    return *best;
}

double l2gain_to_input_index(double beta) {
    if (!(beta > 0.0)) throw Error(ErrorCode::kNonpositiveGain, "L2 gain must be positive");
    return -(beta * beta + 0.25);
}

RationalTF transformed_tf(const RationalTF& g, const Transform2& t, std::vector<std::string>* warnings) {
    require_invertible(t);
    const Polynomial num = t.c * g.den + t.d * g.num;
    const Polynomial den = t.a * g.den + t.b * g.num;
    if (den.is_zero()) throw Error(ErrorCode::kDegenerateTransformedTf, "a + b G vanishes identically");
    if (num.degree() > den.degree()) {
        throw Error(ErrorCode::kDegenerateTransformedTf, "transformed transfer function is improper");
    }
    auto reduced = cancel_common_roots(RationalTF(num, den));
    if (reduced.cancelled > 0) {
        const std::string msg = "cancelled " + std::to_string(reduced.cancelled) + " common root pair(s)";
        if (warnings != nullptr) {
            warnings->push_back(msg);
        } else {
            std::clog << "warning: " << msg << '\n';
        }
    }
    return reduced.tf;
}

PassivityIndices tf_passivity_indices(const RationalTF& g) {
    if (!poles_stable(g.den)) throw Error(ErrorCode::kUnstableDenominator, "denominator is not stable");
    PassivityIndices out;
    out.nu = -sweep_sup([&](double w) { return -g(cd(0.0, w)).real(); });
    out.nu = std::min(out.nu, g.at_infinity());
    out.rho = -sweep_sup([&](double w) { return -(1.0 / g(cd(0.0, w))).real(); });
    if (g.num.degree() == g.den.degree()) out.rho = std::min(out.rho, 1.0 / g.at_infinity());
    return out;
}

Polynomial parse_polynomial(const std::string& text) {
    std::vector<double> c;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        std::string token = text.substr(pos, end - pos);
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
            throw Error(ErrorCode::kInvalidInput, "cannot parse coefficient '" + token + "'");
        }
        c.push_back(v);
        pos = end + 1;
    }
    return Polynomial(std::move(c));
}

}  // namespace eips
