#include "numeric.hpp"

#include "errors.hpp"
#include "rational.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace dymforge {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_grid(const GridField& f, const char* who) {
    if (f.n() < 8)
        throw DomainError(std::string(who) + " needs a grid of at least 8 nodes");
}

// FFTW plans are cached per grid size. The planner is not thread-safe and
// the cached buffers are shared, so one mutex guards every transform; the
// grids here are small enough that serializing them costs nothing.
struct Workspace {
    int n = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd{};
    fftw_plan bwd{};

    ~Workspace() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }
};

std::mutex& fft_mutex() {
    static std::mutex m;
    return m;
}

Workspace& workspace_for(int n) {
    static std::map<int, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[n];
    if (!slot) {
        auto w = std::make_unique<Workspace>();
        w->n = n;
        w->real = fftw_alloc_real(static_cast<std::size_t>(n));
        w->spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        w->fwd = fftw_plan_dft_r2c_1d(n, w->real, w->spec, FFTW_ESTIMATE);
        w->bwd = fftw_plan_dft_c2r_1d(n, w->spec, w->real, FFTW_ESTIMATE);
        slot = std::move(w);
    }
    return *slot;
}

// Round-trip through the half spectrum, applying `apply(m, re, im)` to each
// mode. Includes the 1/n normalization FFTW leaves out.
GridField spectral_map(const GridField& f,
                       const std::function<void(int, double&, double&)>& apply) {
    const int n = f.n();
    std::lock_guard<std::mutex> lock(fft_mutex());
    Workspace& w = workspace_for(n);
    std::copy(f.values.begin(), f.values.end(), w.real);
    fftw_execute(w.fwd);
    for (int m = 0; m <= n / 2; ++m)
        apply(m, w.spec[m][0], w.spec[m][1]);
    fftw_execute(w.bwd);
    GridField out;
    out.values.resize(static_cast<std::size_t>(n));
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i)
        out.values[static_cast<std::size_t>(i)] = w.real[i] * inv;
    return out;
}

} // namespace

GridField make_grid(int n, const std::function<double(double)>& f) {
    if (n < 8)
        throw DomainError("make_grid needs at least 8 nodes");
    GridField g;
    g.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.values[static_cast<std::size_t>(i)] = f(two_pi * i / n);
    return g;
}

GridField spectral_diff(const GridField& f, int order) {
    require_grid(f, "spectral_diff");
    if (order < 1)
        throw DomainError("spectral_diff needs order >= 1");
    const int n = f.n();
    return spectral_map(f, [&](int m, double& re, double& im) {
        if (m == 0 || (order % 2 != 0 && 2 * m == n)) {
            re = 0.0;
            im = 0.0;
            return;
        }
        // (i*m)^order = m^order * i^order, a rotation by order mod 4.
        const double mag = std::pow(static_cast<double>(m), order);
        double a = re, b = im;
        switch (order % 4) {
        case 0: break;
        case 1: std::swap(a, b); a = -a; break;
        case 2: a = -a; b = -b; break;
        default: std::swap(a, b); b = -b; break;
        }
        re = mag * a;
        im = mag * b;
    });
}

GridField fd4_diff(const GridField& f, int order) {
    require_grid(f, "fd4_diff");
    if (order < 1)
        throw DomainError("fd4_diff needs order >= 1");
    const int n = f.n();
    const double h = two_pi / n;
    GridField cur = f;
    for (int pass = 0; pass < order; ++pass) {
        GridField next;
        next.values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double fm2 = cur[(i - 2 + n) % n];
            const double fm1 = cur[(i - 1 + n) % n];
            const double fp1 = cur[(i + 1) % n];
            const double fp2 = cur[(i + 2) % n];
            next[i] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        }
        cur = std::move(next);
    }
    return cur;
}

GridField grid_diff(const GridField& f, int order, DiffBackend backend) {
    return backend == DiffBackend::spectral ? spectral_diff(f, order)
                                            : fd4_diff(f, order);
}

GridField dealias(const GridField& f) {
    require_grid(f, "dealias");
    const int cut = f.n() / 3;
    return spectral_map(f, [&](int m, double& re, double& im) {
        if (m > cut) {
            re = 0.0;
            im = 0.0;
        }
    });
}

double integrate(const GridField& f) {
    require_grid(f, "integrate");
    double sum = 0.0;
    for (double v : f.values)
        sum += v;
    return sum / f.n() * two_pi;
}

double CompiledDensity::eval_node(const std::vector<const double*>& jets, int i) const {
    double sum = 0.0;
    for (const auto& t : terms) {
        double prod = t.coeff;
        for (const auto& fac : t.factors) {
            const double base = jets[static_cast<std::size_t>(fac.order)][i];
            if ((fac.exp2 < 0 || fac.exp2 % 2 != 0) && base <= 0.0)
                throw DomainError("density needs a radical or inverse power of a non-positive value");
            prod *= std::pow(base, static_cast<double>(fac.exp2) / 2.0);
        }
        sum += prod;
    }
    return sum;
}

CompiledDensity compile_density(const DiffPoly& p, int gen) {
    CompiledDensity d;
    d.source = p;
    d.gen = gen;
    for (const auto& mono : p.terms()) {
        CompiledDensity::Term t;
        t.coeff = to_double(mono.coeff);
        for (const auto& [v, e2] : mono.exps) {
            if (v.gen != gen)
                throw DomainError("density must be a polynomial in the jets of one generator");
            t.factors.push_back({v.order, e2});
            d.max_order = std::max(d.max_order, static_cast<int>(v.order));
        }
        d.terms.push_back(std::move(t));
    }
    return d;
}

namespace {

// Pointwise evaluation plan shared by functional_eval and the simulation
// monitors: derivative fields are computed once per sample, not per term.
std::vector<GridField> jet_fields(const GridField& u, int max_order, DiffBackend backend) {
    std::vector<GridField> jets;
    jets.reserve(static_cast<std::size_t>(max_order) + 1);
    jets.push_back(u);
    for (int o = 1; o <= max_order; ++o)
        jets.push_back(grid_diff(u, o, backend));
    return jets;
}

double density_integral(const CompiledDensity& d, const std::vector<GridField>& jets) {
    std::vector<const double*> ptrs;
    ptrs.reserve(static_cast<std::size_t>(d.max_order) + 1);
    for (int o = 0; o <= d.max_order; ++o)
        ptrs.push_back(jets[static_cast<std::size_t>(o)].values.data());
    const int n = jets.front().n();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += d.eval_node(ptrs, i);
    return sum / n * two_pi;
}

} // namespace

double functional_eval(const CompiledDensity& d, const GridField& u, DiffBackend backend) {
    require_grid(u, "functional_eval");
    return density_integral(d, jet_fields(u, d.max_order, backend));
}

namespace {

GridField inverse_root(const GridField& u, double shift, const char* who) {
    GridField w;
    w.values.resize(u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double v = shift + u.values[i];
        if (v <= 0.0)
            throw DomainError(std::string(who) + ": state lost positivity");
        w.values[i] = 1.0 / std::sqrt(v);
    }
    return w;
}

GridField flow_rhs(const GridField& state, double shift, double factor,
                   DiffBackend backend, const char* who) {
    GridField w = inverse_root(state, shift, who);
    if (backend == DiffBackend::spectral)
        w = dealias(w);
    GridField out = grid_diff(w, 3, backend);
    for (double& v : out.values)
        v *= factor;
    return out;
}

} // namespace

GridField hd_rhs(const GridField& u, DiffBackend backend) {
    require_grid(u, "hd_rhs");
    return flow_rhs(u, 0.0, -0.5, backend, "hd_rhs");
}

GridField hd_rhs_classical(const GridField& q, double scale, DiffBackend backend) {
    require_grid(q, "hd_rhs_classical");
    return flow_rhs(q, 1.0, 2.0 * scale, backend, "hd_rhs_classical");
}

GridField rk4_evolve(GridField state, const GridRhs& rhs, double dt, long steps) {
    if (!(dt > 0.0))
        throw DomainError("rk4_evolve needs a positive step");
    const int n = state.n();
    for (long s = 0; s < steps; ++s) {
        const GridField k1 = rhs(state);
        GridField probe;
        probe.values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            probe[i] = state[i] + 0.5 * dt * k1[i];
        const GridField k2 = rhs(probe);
        for (int i = 0; i < n; ++i)
            probe[i] = state[i] + 0.5 * dt * k2[i];
        const GridField k3 = rhs(probe);
        for (int i = 0; i < n; ++i)
            probe[i] = state[i] + dt * k3[i];
        const GridField k4 = rhs(probe);
        for (int i = 0; i < n; ++i)
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double v : state.values)
            if (!std::isfinite(v))
                throw NonFiniteStateError("state became non-finite at step " + std::to_string(s + 1));
    }
    return state;
}

double hd_stable_dt(const GridField& u0, double safety) {
    require_grid(u0, "hd_stable_dt");
    if (!(safety > 0.0))
        throw DomainError("hd_stable_dt needs a positive safety factor");
    const double umin = *std::min_element(u0.values.begin(), u0.values.end());
    if (umin <= 0.0)
        throw DomainError("hd_stable_dt: state lost positivity");
    const int cut = u0.n() / 3;
    const double lam = 0.25 * std::pow(static_cast<double>(cut), 3) * std::pow(umin, -1.5);
    return safety * 2.8 / lam;
}

SimReport simulate_hd(const GridField& u0, double dt, long steps,
                      const std::vector<Monitor>& monitors, const SimOptions& opts) {
    require_grid(u0, "simulate_hd");
    if (!(dt > 0.0) || steps < 1)
        throw DomainError("simulate_hd needs a positive step and at least one step");
    if (opts.sample_every < 1)
        throw DomainError("simulate_hd needs sample_every >= 1");

    SimReport rep;
    rep.columns = {"step", "t"};
    for (const auto& m : monitors)
        rep.columns.push_back(m.name);
    for (const auto& m : monitors)
        rep.columns.push_back("drift_" + m.name);
    rep.drift.assign(monitors.size(), 0.0);

    int max_order = 0;
    for (const auto& m : monitors)
        max_order = std::max(max_order, m.density.max_order);

    std::vector<double> initial(monitors.size(), 0.0);
    auto sample = [&](long step, const GridField& u) {
        const auto jets = jet_fields(u, max_order, opts.backend);
        std::vector<double> row{static_cast<double>(step), step * dt};
        std::vector<double> devs;
        for (std::size_t k = 0; k < monitors.size(); ++k) {
            const double v = density_integral(monitors[k].density, jets);
            if (step == 0)
                initial[k] = v;
            const double denom = std::abs(initial[k]) > 0.0 ? std::abs(initial[k]) : 1.0;
            const double dev = std::abs(v - initial[k]) / denom;
            rep.drift[k] = std::max(rep.drift[k], dev);
            row.push_back(v);
            devs.push_back(dev);
        }
        row.insert(row.end(), devs.begin(), devs.end());
        rep.rows.push_back(std::move(row));
    };

    GridField u = u0;
    sample(0, u);
    const GridRhs rhs = [&](const GridField& s) { return hd_rhs(s, opts.backend); };
    for (long s = 1; s <= steps; ++s) {
        u = rk4_evolve(std::move(u), rhs, dt, 1);
        if (s % opts.sample_every == 0 || s == steps)
            sample(s, u);
    }
    rep.final_state = std::move(u);
    return rep;
}

std::string SimReport::to_csv() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << '\n';
    }
    return out.str();
}

std::string SimReport::to_json() const {
    nlohmann::json j;
    j["columns"] = columns;
    j["rows"] = rows;
    j["drift"] = drift;
    return j.dump(2);
}

} // namespace dymforge
