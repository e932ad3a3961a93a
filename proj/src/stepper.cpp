#include "asianuv/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asianuv/errors.hpp"
#include "asianuv/parallel.hpp"

namespace asianuv {

void PolicyIterConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("policy iteration: tol must be > 0");
    if (max_iters < 1) throw ConfigError("policy iteration: max_iters must be >= 1");
    if (!(deadband >= 0.0)) throw ConfigError("policy iteration: deadband must be >= 0");
}

namespace {

// Lagrange weights for four equispaced nodes 0..3 evaluated at position q.
inline void lagrange4(double q, double w[4]) {
    w[0] = -(q - 1.0) * (q - 2.0) * (q - 3.0) / 6.0;
    w[1] = q * (q - 2.0) * (q - 3.0) / 2.0;
    w[2] = -q * (q - 1.0) * (q - 3.0) / 2.0;
    w[3] = q * (q - 1.0) * (q - 2.0) / 6.0;
}

struct SliceBuffers {
    std::vector<double> w, v, de, dm, fi, fe, lo, di, up, rhs, p, q, gamma, prev;
    std::vector<std::uint8_t> policy, next_policy;
    explicit SliceBuffers(std::size_t n)
        : w(n), v(n), de(n), dm(n), fi(n, 0.0), fe(n, 0.0), lo(n), di(n), up(n), rhs(n), p(n), q(n),
          gamma(n), prev(n), policy(n), next_policy(n) {}
};

} // namespace

BackwardStepper::BackwardStepper(GridPtr grid, double r, SchemeConfig scheme)
    : grid_(std::move(grid)), r_(r), scheme_(scheme) {
    scheme_.validate();
    const auto& x = grid_->x_nodes();
    const std::size_t N = x.size() - 1;
    if (scheme_.y_advection == YAdvection::semi_lagrangian_cubic && grid_->ny() < 4)
        throw ConfigError("scheme: cubic y-transport needs >= 4 y-nodes");
    rows_.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) rows_[i].drift = r_ * x[i];
    for (std::size_t i = 1; i < N; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        RowWeights& rw = rows_[i];
        rw.a = 2.0 / (hm * (hm + hp));
        rw.c = 2.0 / (hp * (hm + hp));
        rw.b = -(rw.a + rw.c);
        rw.cl = -hp / (hm * (hm + hp));
        rw.cd = (hp - hm) / (hm * hp);
        rw.cu = hm / (hp * (hm + hp));
        rw.fd = -1.0 / hp;
        rw.fu = 1.0 / hp;
    }
    const double hN = x[N] - x[N - 1];
    const double hN1 = x[N - 1] - x[N - 2];
    ca_ = 1.0 / hN1;
    cb_ = -(1.0 / hN + 1.0 / hN1);
    cc_ = 1.0 / hN;
}

std::vector<double> BackwardStepper::constant_diffusion(double sigma) const {
    const Grid2D& g = *grid_;
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.nx(); ++i) {
        const double xi = g.x(i);
        const double di = 0.5 * sigma * sigma * xi * xi;
        std::fill_n(d.begin() + static_cast<std::ptrdiff_t>(g.index(i, 0)), g.ny(), di);
    }
    return d;
}

std::vector<double> BackwardStepper::diffusion_floor(double sigma_lo) const {
    const Grid2D& g = *grid_;
    std::vector<double> d(g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i) d[i] = 0.5 * sigma_lo * sigma_lo * g.x(i) * g.x(i);
    return d;
}

void BackwardStepper::transport_row(std::span<const double> in, std::span<double> out,
                                    double shift) const {
    const std::size_t J = in.size() - 1;
    if (shift == 0.0) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const double c = shift / grid_->dy();

    if (scheme_.y_advection == YAdvection::upwind1) {
        // V_j <- V_j + c (V_{j+1} - V_j); the stencil never reads below j = 0 and
        // linear extrapolation supplies V_{J+1}.
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(c)));
        const double cs = c / static_cast<double>(m);
        std::vector<double> buf(in.begin(), in.end());
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t j = 0; j < J; ++j) out[j] = buf[j] + cs * (buf[j + 1] - buf[j]);
            out[J] = buf[J] + cs * (buf[J] - buf[J - 1]);
            if (s + 1 < m) std::copy(out.begin(), out.end(), buf.begin());
        }
        return;
    }

    // Semi-Lagrangian: out_j = V(y_j + shift) by cubic interpolation, linear
    // extrapolation past y_max.
    const double K = std::floor(c);
    const double f = c - K;
    const auto k = static_cast<std::size_t>(K);
    double wc[4];
    lagrange4(1.0 + f, wc);
    for (std::size_t j = 0; j <= J; ++j) {
        const std::size_t base = j + k;  // departure cell [base, base + 1]
        if (base >= J) {
            const double p = static_cast<double>(base - J) + f;
            out[j] = in[J] + p * (in[J] - in[J - 1]);
        } else if (base >= 1 && base + 2 <= J) {
            const double* s = &in[base - 1];
            out[j] = wc[0] * s[0] + wc[1] * s[1] + wc[2] * s[2] + wc[3] * s[3];
        } else {
            const std::size_t b0 = base == 0 ? 0 : J - 3;
            double wo[4];
            lagrange4(static_cast<double>(base - b0) + f, wo);
            const double* s = &in[b0];
            out[j] = wo[0] * s[0] + wo[1] * s[1] + wo[2] * s[2] + wo[3] * s[3];
        }
    }
}

PriceSurface BackwardStepper::explicit_input(const PriceSurface& next, double dt) const {
    const Grid2D& g = *grid_;
    PriceSurface w(grid_, next.t() - dt, 0.0);
    const double disc = std::exp(-r_ * dt);
    const double h = scheme_.splitting == Splitting::strang ? 0.5 * dt : dt;
    const std::size_t ny = g.ny();
    parallel_for(g.nx(), scheme_.threads, [&](std::size_t i) {
        std::span<const double> in(next.values().data() + g.index(i, 0), ny);
        std::span<double> out(w.values().data() + g.index(i, 0), ny);
        transport_row(in, out, g.x(i) * h);
        for (double& v : out) v *= disc;
    });
    return w;
}

PriceSurface BackwardStepper::finish(PriceSurface u, double dt) const {
    if (scheme_.splitting == Splitting::lie) return u;
    const Grid2D& g = *grid_;
    PriceSurface v(grid_, u.t(), 0.0);
    const double h = dt - 0.5 * dt;
    const std::size_t ny = g.ny();
    parallel_for(g.nx(), scheme_.threads, [&](std::size_t i) {
        std::span<const double> in(u.values().data() + g.index(i, 0), ny);
        std::span<double> out(v.values().data() + g.index(i, 0), ny);
        transport_row(in, out, g.x(i) * h);
    });
    return v;
}

namespace {

struct SliceSolver {
    const std::vector<double>& x;
    double ca, cb, cc;

    // Thomas elimination for rows 0..N-1 plus the Gamma = 0 closure row N, which
    // couples v[N-2], v[N-1], v[N]; or a fixed v[N] when `far` is given.
    bool solve(SliceBuffers& b, std::size_t N, const double* far) const {
        double denom = b.di[0];
        if (denom == 0.0) return false;
        b.p[0] = b.up[0] / denom;
        b.q[0] = b.rhs[0] / denom;
        for (std::size_t i = 1; i < N; ++i) {
            denom = b.di[i] - b.lo[i] * b.p[i - 1];
            if (denom == 0.0 || !std::isfinite(denom)) return false;
            b.p[i] = b.up[i] / denom;
            b.q[i] = (b.rhs[i] - b.lo[i] * b.q[i - 1]) / denom;
        }
        if (far) {
            b.v[N] = *far;
            for (std::size_t i = N; i-- > 0;) b.v[i] = b.q[i] - b.p[i] * b.v[i + 1];
            return true;
        }
        const double beta = cb - ca * b.p[N - 2];
        const double den = cc - beta * b.p[N - 1];
        if (den == 0.0 || !std::isfinite(den)) return false;
        b.v[N] = (-ca * b.q[N - 2] - beta * b.q[N - 1]) / den;
        for (std::size_t i = N; i-- > 0;) b.v[i] = b.q[i] - b.p[i] * b.v[i + 1];
        return true;
    }
};

} // namespace

PriceSurface BackwardStepper::step_linear(const PriceSurface& w, std::span<const double> diffusion,
                                          std::span<const double> floor,
                                          const PriceSurface* source_implicit,
                                          const PriceSurface* source_explicit, double dt,
                                          double theta, double t_out,
                                          std::span<const double> x_max_values) const {
    const Grid2D& g = *grid_;
    const std::size_t nx = g.nx(), ny = g.ny(), N = nx - 1;
    PriceSurface out(grid_, t_out, 0.0);
    const SliceSolver solver{g.x_nodes(), ca_, cb_, cc_};
    const bool guard = scheme_.monotone_safeguard;

    parallel_for(ny, scheme_.threads, [&](std::size_t j) {
        SliceBuffers b(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            b.w[i] = w.values()[k];
            b.de[i] = diffusion[k];
            if (source_implicit) b.fi[i] = source_implicit->values()[k];
            if (source_explicit) b.fe[i] = source_explicit->values()[k];
        }
        b.lo[0] = 0.0;
        b.di[0] = 1.0;
        b.up[0] = 0.0;
        b.rhs[0] = b.w[0] + dt * (theta * b.fi[0] + (1.0 - theta) * b.fe[0]);
        for (std::size_t i = 1; i < N; ++i) {
            const RowWeights& rw = rows_[i];
            const bool central = floor[i] * rw.a + rw.drift * rw.cl >= 0.0;
            const double d = b.de[i];
            const double L = d * rw.a + rw.drift * (central ? rw.cl : 0.0);
            const double D = d * rw.b + rw.drift * (central ? rw.cd : rw.fd);
            const double U = d * rw.c + rw.drift * (central ? rw.cu : rw.fu);
            double th = theta;
            if (guard && th < 1.0 && 1.0 + (1.0 - th) * dt * D < 0.0) th = 1.0;
            const double ex = (1.0 - th) * dt;
            b.rhs[i] = b.w[i] + ex * (L * b.w[i - 1] + D * b.w[i] + U * b.w[i + 1]) +
                       dt * (th * b.fi[i] + (1.0 - th) * b.fe[i]);
            b.lo[i] = -th * dt * L;
            b.di[i] = 1.0 - th * dt * D;
            b.up[i] = -th * dt * U;
        }
        if (!solver.solve(b, N, x_max_values.empty() ? nullptr : &x_max_values[j])) {
            std::ostringstream os;
            os << "singular x-system on y-slice j=" << j << " (y=" << g.y(j) << ")";
            throw SolverError(os.str());
        }
        for (std::size_t i = 0; i < nx; ++i) out.values()[g.index(i, j)] = b.v[i];
    });
    return out;
}

PriceSurface BackwardStepper::step_controlled(const PriceSurface& w, VolBand band,
                                              const PolicyIterConfig& pcfg, double dt,
                                              double theta, double t_out, int level,
                                              StepStats& stats,
                                              std::span<const double> x_max_values) const {
    const Grid2D& g = *grid_;
    const std::vector<double> floor = diffusion_floor(band.lo);
    if (band.degenerate()) {
        const std::vector<double> d = constant_diffusion(band.lo);
        stats.max_policy_iters = std::max(stats.max_policy_iters, 1);
        stats.total_policy_iters += static_cast<long long>(g.ny());
        return step_linear(w, d, floor, nullptr, nullptr, dt, theta, t_out, x_max_values);
    }

    const std::size_t nx = g.nx(), ny = g.ny(), N = nx - 1;
    PriceSurface out(grid_, t_out, 0.0);
    const SliceSolver solver{g.x_nodes(), ca_, cb_, cc_};
    const bool guard = scheme_.monotone_safeguard;
    std::vector<int> iters(ny, 0);
    std::vector<double> residual(ny, 0.0);

    parallel_for(ny, scheme_.threads, [&](std::size_t j) {
        SliceBuffers b(nx);
        for (std::size_t i = 0; i < nx; ++i) b.w[i] = w.values()[g.index(i, j)];

        // Explicit half: pointwise maximizer of d * Gamma(W) over the band edges.
        std::vector<double> th(nx, theta);
        std::vector<double> Lm(nx), Dm(nx), Um(nx);
        std::vector<bool> central(nx, true);
        b.rhs[0] = b.w[0];
        for (std::size_t i = 1; i < N; ++i) {
            const RowWeights& rw = rows_[i];
            const double xi = g.x(i);
            const double gw = rw.a * b.w[i - 1] + rw.b * b.w[i] + rw.c * b.w[i + 1];
            const double s = gw >= -pcfg.deadband ? band.hi : band.lo;
            b.policy[i] = gw >= -pcfg.deadband ? 1 : 0;
            const double d = 0.5 * s * s * xi * xi;
            central[i] = floor[i] * rw.a + rw.drift * rw.cl >= 0.0;
            const double L = d * rw.a + rw.drift * (central[i] ? rw.cl : 0.0);
            const double D = d * rw.b + rw.drift * (central[i] ? rw.cd : rw.fd);
            const double U = d * rw.c + rw.drift * (central[i] ? rw.cu : rw.fu);
            if (guard && th[i] < 1.0 && 1.0 + (1.0 - th[i]) * dt * D < 0.0) th[i] = 1.0;
            const double ex = (1.0 - th[i]) * dt;
            b.rhs[i] = b.w[i] + ex * (L * b.w[i - 1] + D * b.w[i] + U * b.w[i + 1]);
        }

        // Implicit half: Howard iteration, policy initialised from the explicit half.
        int k = 0;
        double change = 0.0;
        for (;;) {
            ++k;
            b.lo[0] = 0.0;
            b.di[0] = 1.0;
            b.up[0] = 0.0;
            for (std::size_t i = 1; i < N; ++i) {
                const RowWeights& rw = rows_[i];
                const double xi = g.x(i);
                const double s = b.policy[i] ? band.hi : band.lo;
                const double d = 0.5 * s * s * xi * xi;
                const double L = d * rw.a + rw.drift * (central[i] ? rw.cl : 0.0);
                const double D = d * rw.b + rw.drift * (central[i] ? rw.cd : rw.fd);
                const double U = d * rw.c + rw.drift * (central[i] ? rw.cu : rw.fu);
                b.lo[i] = -th[i] * dt * L;
                b.di[i] = 1.0 - th[i] * dt * D;
                b.up[i] = -th[i] * dt * U;
            }
            if (k > 1) std::copy(b.v.begin(), b.v.end(), b.prev.begin());
            if (!solver.solve(b, N, x_max_values.empty() ? nullptr : &x_max_values[j])) {
                std::ostringstream os;
                os << "singular x-system on y-slice j=" << j << " (y=" << g.y(j) << ")";
                throw SolverError(os.str(), level);
            }
            bool same = true;
            for (std::size_t i = 1; i < N; ++i) {
                const RowWeights& rw = rows_[i];
                const double gv = rw.a * b.v[i - 1] + rw.b * b.v[i] + rw.c * b.v[i + 1];
                b.next_policy[i] = gv >= -pcfg.deadband ? 1 : 0;
                if (b.next_policy[i] != b.policy[i]) same = false;
            }
            if (same) {
                change = 0.0;
                break;
            }
            if (k > 1) {
                double dmax = 0.0, vmax = 0.0;
                for (std::size_t i = 0; i < nx; ++i) {
                    dmax = std::max(dmax, std::abs(b.v[i] - b.prev[i]));
                    vmax = std::max(vmax, std::abs(b.v[i]));
                }
                change = dmax / std::max(vmax, 1e-300);
                if (change < pcfg.tol) break;
            }
            if (k >= pcfg.max_iters) {
                std::ostringstream os;
                os << "policy iteration did not converge on y-slice j=" << j << " at level "
                   << level << " after " << k << " iterations (last relative change " << change
                   << ")";
                throw SolverError(os.str(), level);
            }
            std::swap(b.policy, b.next_policy);
        }
        iters[j] = k;
        residual[j] = change;
        for (std::size_t i = 0; i < nx; ++i) out.values()[g.index(i, j)] = b.v[i];
    });

    for (int k : iters) {
        stats.max_policy_iters = std::max(stats.max_policy_iters, k);
        stats.total_policy_iters += k;
    }
    return out;
}

} // namespace asianuv
