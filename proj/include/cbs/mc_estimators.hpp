#pragma once

// Monte-Carlo estimators of the polarized backscattering components.
//
// Sampling follows the reciprocal-path procedure: for the scattering terms a
// position and a final frequency are drawn, three photons are launched from
// there (two at the laser frequency, one at the final one), and the sums over
// truncations of each path are accumulated with the printed case factors. For
// the propagation terms a probe path is traced from the surface and a pump
// photon is launched from a point of each of its segments.
//
// Every walk is sampled with exponential steps at its own mean free path and
// uniform directions; the vectorial weight of a step is carried by the 3/2
// measure excess together with the transverse projection of the polarization
// vectors. The scalar mode drops all polarization factors, which must (and
// does, in the tests) reproduce the quadrature components.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "cbs/atom.hpp"
#include "cbs/estimate.hpp"
#include "cbs/linalg.hpp"
#include "cbs/polarization.hpp"
#include "cbs/rng.hpp"
#include "cbs/scalar_components.hpp"

namespace cbs {

struct McOptions {
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 1;
    int workers = 1;
    int cap_override = 0; // 0: default event cap max(200, 40 b)
};

inline int path_cap(double b) { return std::max(200, int(40.0 * b)); }

namespace mcdetail {

// Block-deterministic driver: samples are grouped in fixed blocks, workers
// pick blocks, block partials merge in index order, so the result is
// bit-identical for any worker count.
template <std::size_t K, typename F>
std::array<McEstimate, K> run(const McOptions& opt, F&& per_sample)
{
    constexpr std::uint64_t block_size = 8192;
    const std::uint64_t n_blocks = (opt.n_samples + block_size - 1) / block_size;
    std::vector<std::array<McAccumulator, K>> partials(n_blocks);
    std::atomic<std::uint64_t> next{0};
    const int workers = std::max(1, opt.workers);

    auto work = [&]() {
        for (;;) {
            const std::uint64_t blk = next.fetch_add(1);
            if (blk >= n_blocks)
                return;
            const std::uint64_t lo = blk * block_size;
            const std::uint64_t hi = std::min(opt.n_samples, lo + block_size);
            std::array<McAccumulator, K>& acc = partials[blk];
            std::array<double, K> vals{};
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng(opt.seed, i);
                vals.fill(0.0);
                per_sample(i, rng, vals);
                for (std::size_t k = 0; k < K; ++k)
                    acc[k].add(vals[k]);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }

    std::array<McAccumulator, K> total{};
    for (const auto& p : partials)
        for (std::size_t k = 0; k < K; ++k)
            total[k].merge(p[k]);
    std::array<McEstimate, K> out;
    for (std::size_t k = 0; k < K; ++k)
        out[k] = total[k].estimate();
    return out;
}

// chains of a photon launched from depth z0 into the bulk (reciprocal walk);
// only depths and projection products matter
struct ReciprocalWalk {
    // index k = number of scattering events of the truncated chain
    std::vector<double> z;       // z[0] = z0
    std::vector<double> steps;   // steps[k] = length of step k (1-based conceptually)
    std::vector<CVec3> eps_l;    // P(d1)...P(dk) eps_L
    std::vector<CVec3> eps_d;    // P(d1)...P(dk) eps_D
};

inline void reciprocal_walk(RngStream& rng, double z0, double b, double mfp, int cap,
                            bool polarized, const CVec3& eL, const CVec3& eD,
                            ReciprocalWalk& out)
{
    out.z.assign(1, z0);
    out.steps.clear();
    out.eps_l.assign(1, eL);
    out.eps_d.assign(1, eD);
    Mat3 m = Mat3::identity();
    double z = z0;
    for (int k = 0; k < cap; ++k) {
        Vec3 d;
        rng.unit_vector(d.x, d.y, d.z);
        const double r = mfp * rng.exponential();
        z += r * d.z;
        if (z < 0.0 || z > b)
            return;
        out.z.push_back(z);
        out.steps.push_back(r);
        if (polarized) {
            m = m * Mat3::projector(d); // right product: new projector applied first
            out.eps_l.push_back(m * eL);
            out.eps_d.push_back(m * eD);
        }
    }
}

struct Workspace {
    ReciprocalWalk u, v, w, pump;
    std::vector<double> wu, wv, ww;  // ladder weights per truncation
    std::vector<cplx> cv, cw;        // crossed chain weights per truncation
    std::vector<double> probe_z, probe_r;
    std::vector<Vec3> probe_dir;
    std::vector<Mat3> fwd;           // forward projector products along the probe
    std::vector<Mat3> bwd;           // per-truncation backward products
};

inline Workspace& workspace()
{
    static thread_local Workspace ws;
    return ws;
}

} // namespace mcdetail

// ---------------------------------------------------------------------------
// photon path record (diagnostics and path statistics)

struct PhotonPath {
    double entry_depth = 0.0;
    std::vector<Vec3> vertices;
    std::vector<Vec3> directions;     // directions[k] leads into vertices[k+1]
    std::vector<CVec3> polarization;  // arriving polarization per vertex
    bool exited = false;
};

// Walk from `origin` with exponential steps at the mean free path of
// delta_path (in units of the delta_ref path) and uniform directions; the
// polarization is projected transverse at every scattering event.
inline PhotonPath sample_path(RngStream& rng, const Vec3& origin, Detuning delta_path,
                              Detuning delta_ref, double b, int cap,
                              const CVec3& launch_pol)
{
    const double mfp = mean_free_path_ratio(delta_ref, delta_path);
    PhotonPath p;
    p.entry_depth = origin.z;
    p.vertices.push_back(origin);
    p.polarization.push_back(launch_pol);
    Vec3 pos = origin;
    CVec3 eps = launch_pol;
    for (int k = 0; k < cap; ++k) {
        Vec3 d;
        rng.unit_vector(d.x, d.y, d.z);
        const double r = mfp * rng.exponential();
        pos = pos + d * r;
        if (pos.z < 0.0 || pos.z > b) {
            p.exited = true;
            return p;
        }
        eps = project(eps, d);
        p.vertices.push_back(pos);
        p.directions.push_back(d);
        p.polarization.push_back(eps);
    }
    return p;
}

// ---------------------------------------------------------------------------
// channel context

namespace mcdetail {

struct Context {
    double b;
    Detuning delta;
    bool polarized;
    double boost;   // measure excess per step: 3/2 polarized, 1 scalar
    CVec3 eL, eD;
    int cap;

    explicit Context(const MediumParams& p, int cap_override = 0)
        : b(p.b), delta(p.detuning), polarized(p.channel == Channel::HParallelH),
          boost(polarized ? 1.5 : 1.0), eL(helicity_laser()), eD(helicity_detector()),
          cap(cap_override > 0 ? cap_override : path_cap(p.b))
    {
    }
};

// weight arrays of the three reciprocal walks for one (delta, delta') pair
inline void build_scattering_chains(const Context& c, Detuning dp, Workspace& ws)
{
    const double rel = mean_free_path_ratio(c.delta, dp); // ell'/ell
    const cplx a = complex_attenuation(c.delta, dp);
    const cplx q = cplx(1.0, 2.0 * c.delta.v) / cplx(1.0, 2.0 * dp.v);

    const auto ladder_weights = [&](const ReciprocalWalk& walk, double mfp,
                                    std::vector<double>& out) {
        out.resize(walk.z.size());
        double w = 1.0;
        for (std::size_t k = 0; k < walk.z.size(); ++k) {
            if (k > 0)
                w *= c.boost;
            out[k] = w * std::exp(-walk.z[k] / mfp);
        }
    };
    ladder_weights(ws.u, 1.0, ws.wu);
    ladder_weights(ws.v, 1.0, ws.wv);
    ladder_weights(ws.w, rel, ws.ww);

    // crossed chains: the v path pairs the laser amplitude with the conjugate
    // final one, the w path is its conjugate partner sampled at the final
    // frequency
    ws.cv.resize(ws.v.z.size());
    cplx chain = 1.0;
    for (std::size_t m = 0; m < ws.v.z.size(); ++m) {
        if (m > 0)
            chain *= c.boost * q * std::exp(-(a - 1.0) * ws.v.steps[m - 1]);
        ws.cv[m] = chain * std::exp(-a * ws.v.z[m]);
    }
    ws.cw.resize(ws.w.z.size());
    chain = 1.0;
    const cplx aconj = std::conj(a);
    for (std::size_t l = 0; l < ws.w.z.size(); ++l) {
        if (l > 0)
            chain *= c.boost * rel * std::conj(q) *
                     std::exp(-aconj * ws.w.steps[l - 1] + ws.w.steps[l - 1] / rel);
        ws.cw[l] = chain * std::exp(-aconj * ws.w.z[l]);
    }
}

// one sample of the nonlinear scattering estimators at final detuning dp:
// vals = { ladder, crossed } per unit s (without the inelastic P weight)
inline void scattering_sample(const Context& c, Detuning dp, RngStream& rng,
                              double& ladder, double& crossed)
{
    Workspace& ws = workspace();
    const double z0 = c.b * rng.uniform();
    const double rel = mean_free_path_ratio(c.delta, dp);
    reciprocal_walk(rng, z0, c.b, 1.0, c.cap, c.polarized, c.eL, c.eD, ws.u);
    reciprocal_walk(rng, z0, c.b, 1.0, c.cap, c.polarized, c.eL, c.eD, ws.v);
    reciprocal_walk(rng, z0, c.b, rel, c.cap, c.polarized, c.eL, c.eD, ws.w);
    build_scattering_chains(c, dp, ws);

    const double overall = c.boost; // the single printed 3/2
    double lad = 0.0;
    cplx cro = 0.0;
    for (std::size_t n = 0; n < ws.wu.size(); ++n)
        for (std::size_t m = 0; m < ws.wv.size(); ++m) {
            const double case_ladder = (n == 0 && m == 0) ? 1.0 : 2.0;
            for (std::size_t l = 0; l < ws.ww.size(); ++l) {
                double pil = 1.0;
                cplx pic = 1.0;
                if (c.polarized) {
                    pil = pi_ladder(ws.u.eps_l[n], ws.v.eps_l[m], ws.w.eps_d[l]);
                    pic = pi_crossed(ws.u.eps_l[n], ws.v.eps_l[m], ws.w.eps_l[l],
                                     ws.w.eps_d[l], ws.v.eps_d[m]);
                }
                lad += case_ladder * ws.wu[n] * ws.wv[m] * ws.ww[l] * pil;
                double case_crossed = 4.0;
                if (m == 0 && l == 0)
                    case_crossed = 0.0;
                else if ((n == 0 && m == 0) || (n == 0 && l == 0))
                    case_crossed = 2.0;
                if (case_crossed != 0.0)
                    cro += case_crossed * ws.wu[n] * ws.cv[m] * ws.cw[l] * pic;
            }
        }
    ladder = c.b * overall * lad;
    crossed = c.b * overall * cro.real();
}

} // namespace mcdetail

// ---------------------------------------------------------------------------
// scattering estimators

struct McPair {
    McEstimate ladder, crossed;
};

// inelastic components: final detuning sampled from the one-atom spectrum
inline McPair mc_inelastic(const MediumParams& params, const McOptions& opt)
{
    params.validate();
    const mcdetail::Context ctx(params, opt.cap_override);
    const SpectrumSampler sampler(params.detuning);
    auto est = mcdetail::run<2>(opt, [&](std::uint64_t, RngStream& rng,
                                         std::array<double, 2>& vals) {
        const Detuning dp = sampler.sample(rng.uniform());
        mcdetail::scattering_sample(ctx, dp, rng, vals[0], vals[1]);
    });
    return {est[0], est[1]};
}

// elastic scattering components: the spectrum is replaced by -2 delta(w'-w)
inline McPair mc_elastic_scatt(const MediumParams& params, const McOptions& opt)
{
    params.validate();
    const mcdetail::Context ctx(params, opt.cap_override);
    auto est = mcdetail::run<2>(opt, [&](std::uint64_t, RngStream& rng,
                                         std::array<double, 2>& vals) {
        mcdetail::scattering_sample(ctx, params.detuning, rng, vals[0], vals[1]);
        vals[0] *= -2.0;
        vals[1] *= -2.0;
    });
    return {est[0], est[1]};
}

// per-frequency densities at a fixed final detuning (no spectral weight);
// the enhancement curve is 1 + crossed/ladder
inline McPair mc_spectral_density(const MediumParams& params, Detuning dp,
                                  const McOptions& opt)
{
    params.validate();
    const mcdetail::Context ctx(params, opt.cap_override);
    auto est = mcdetail::run<2>(opt, [&](std::uint64_t, RngStream& rng,
                                         std::array<double, 2>& vals) {
        mcdetail::scattering_sample(ctx, dp, rng, vals[0], vals[1]);
    });
    return {est[0], est[1]};
}

inline McEstimate mc_inelastic_ladder(const MediumParams& p, const McOptions& o)
{
    return mc_inelastic(p, o).ladder;
}
inline McEstimate mc_inelastic_crossed(const MediumParams& p, const McOptions& o)
{
    return mc_inelastic(p, o).crossed;
}

// ---------------------------------------------------------------------------
// linear estimator

inline McPair mc_linear(const MediumParams& params, const McOptions& opt)
{
    params.validate();
    const mcdetail::Context ctx(params, opt.cap_override);
    auto est = mcdetail::run<2>(opt, [&](std::uint64_t, RngStream& rng,
                                         std::array<double, 2>& vals) {
        double z = rng.exponential();
        if (z > ctx.b)
            return;
        Mat3 m = Mat3::identity();
        double ladder = 0.0, crossed = 0.0;
        double boost = ctx.boost; // (3/2)^n including the printed one
        for (int k = 0; k < ctx.cap; ++k) {
            const double atten = std::exp(-z);
            if (ctx.polarized) {
                const CVec3 fwd = m * ctx.eL;
                const CVec3 rev = m.transpose() * ctx.eL;
                const cplx df = dot_conj(fwd, ctx.eD); // eps_D* . eps
                const cplx dr = dot_conj(rev, ctx.eD);
                ladder += boost * std::norm(df) * atten;
                if (k > 0)
                    crossed += boost * (df * std::conj(dr)).real() * atten;
            } else {
                ladder += atten;
                if (k > 0)
                    crossed += atten;
            }
            Vec3 d;
            rng.unit_vector(d.x, d.y, d.z);
            z += rng.exponential() * d.z;
            if (z < 0.0 || z > ctx.b)
                break;
            if (ctx.polarized)
                m = Mat3::projector(d) * m; // left product: arriving polarization
            boost *= ctx.boost;
        }
        vals[0] = ladder;
        vals[1] = crossed;
    });
    return {est[0], est[1]};
}

// ---------------------------------------------------------------------------
// propagation estimators

namespace mcdetail {

// The probe's last vertex radiates the detected line toward the detector and
// carries the same 3/2 dipole factor that the linear and scattering
// estimators include; it is applied once per sample at the end.
inline void prop_sample(const Context& c, RngStream& rng, double& ladder, double& crossed)
{
    Workspace& ws = workspace();
    ladder = crossed = 0.0;
    double z = rng.exponential();
    if (z > c.b)
        return;

    // trace probe path
    ws.probe_z.assign(1, z);
    ws.probe_r.clear();
    ws.probe_dir.clear();
    for (int k = 1; k < c.cap; ++k) {
        Vec3 d;
        rng.unit_vector(d.x, d.y, d.z);
        const double r = rng.exponential();
        const double zn = ws.probe_z.back() + r * d.z;
        if (zn < 0.0 || zn > c.b)
            break;
        ws.probe_z.push_back(zn);
        ws.probe_r.push_back(r);
        ws.probe_dir.push_back(d);
    }
    const std::size_t J = ws.probe_z.size();

    // forward polarization products F_l = P(s_l)...P(s_1) along internal segments
    const Vec3 ez{0.0, 0.0, 1.0};
    if (c.polarized) {
        ws.fwd.assign(1, Mat3::identity());
        for (std::size_t j = 0; j < ws.probe_dir.size(); ++j)
            ws.fwd.push_back(Mat3::projector(ws.probe_dir[j]) * ws.fwd.back());
    }

    // one pump per physical segment: entry, internal j, exit per truncation
    struct PumpArrays {
        std::vector<double> w;
        std::vector<CVec3> el, ed;
    };
    static thread_local std::vector<PumpArrays> pumps;
    const std::size_t n_pumps = 1 + (J - 1) + J; // entry + internal + exit(n)
    if (pumps.size() < n_pumps)
        pumps.resize(n_pumps);

    const auto launch_pump = [&](std::size_t slot, double zp) {
        reciprocal_walk(rng, zp, c.b, 1.0, c.cap, c.polarized, c.eL, c.eD, ws.pump);
        PumpArrays& pa = pumps[slot];
        pa.w.resize(ws.pump.z.size());
        double wgt = 1.0;
        for (std::size_t k = 0; k < ws.pump.z.size(); ++k) {
            if (k > 0)
                wgt *= c.boost;
            pa.w[k] = wgt * std::exp(-ws.pump.z[k]);
        }
        if (c.polarized) {
            pa.el = ws.pump.eps_l;
            pa.ed = ws.pump.eps_d;
        }
    };

    launch_pump(0, ws.probe_z[0] * rng.uniform()); // entry segment
    for (std::size_t j = 1; j < J; ++j) {
        const double frac = rng.uniform();
        launch_pump(j, ws.probe_z[j - 1] + frac * ws.probe_r[j - 1] * ws.probe_dir[j - 1].z);
    }
    for (std::size_t n = 1; n <= J; ++n)
        launch_pump(J + n - 1, ws.probe_z[n - 1] * rng.uniform()); // exit of truncation n

    // pump sums with the printed case factors
    const auto pump_ladder = [&](const PumpArrays& pa, bool coherent_segment,
                                 const CVec3& e1, const CVec3& e3) {
        double s = 0.0;
        for (std::size_t mp = 0; mp < pa.w.size(); ++mp) {
            const double cases = (mp == 0 && coherent_segment) ? 1.0 : 2.0;
            const double pi = c.polarized ? pi_prop_ladder(e1, pa.el[mp], e3) : 1.0;
            s += cases * pa.w[mp] * pi;
        }
        return s;
    };

    double probe_w = 1.0;
    for (std::size_t n = 1; n <= J; ++n) {
        if (n > 1)
            probe_w *= c.boost;
        const double exit_w = probe_w * std::exp(-ws.probe_z[n - 1]);

        // backward products B_l = P(s_l)...P(s_{n-1}) for this truncation
        if (c.polarized) {
            ws.bwd.assign(n + 1, Mat3::identity());
            for (std::size_t l = n; l-- > 0;) {
                const Mat3 p =
                    l == 0 ? Mat3::projector(ez) : Mat3::projector(ws.probe_dir[l - 1]);
                ws.bwd[l] = p * ws.bwd[l + 1];
            }
        }

        for (std::size_t l = 0; l <= n; ++l) {
            const PumpArrays& pa = l == 0            ? pumps[0]
                                   : l < n           ? pumps[l]
                                                     : pumps[J + n - 1];
            const double seg_len = l == 0   ? ws.probe_z[0]
                                   : l < n  ? ws.probe_r[l - 1]
                                            : ws.probe_z[n - 1];
            CVec3 e1, e3, te3;
            if (c.polarized) {
                e1 = l < n ? ws.fwd[l] * c.eL : Mat3::projector(ez) * (ws.fwd[n - 1] * c.eL);
                e3 = ws.bwd[l] * c.eD;
                te3 = ws.bwd[l] * c.eL;
            }
            const double pl = pump_ladder(pa, l == 0, e1, e3);
            ladder += exit_w * seg_len * pl;

            // crossed: reciprocal diagrams (probe singly scattered excluded)
            if (n > 1)
                crossed += exit_w * seg_len * pl;
            // crossed: reversed-photon diagrams
            if (l < n) {
                double s = 0.0;
                for (std::size_t mp = 0; mp < pa.w.size(); ++mp) {
                    double cases = 0.0;
                    if (l == 0)
                        cases = (mp > 0) ? (n > 1 ? 4.0 : 2.0) : 0.0;
                    else
                        cases = 2.0;
                    if (cases == 0.0)
                        continue;
                    const double pi =
                        c.polarized
                            ? pi_prop_crossed(e1, pa.el[mp], e3, pa.ed[mp], te3)
                            : 1.0;
                    s += cases * pa.w[mp] * pi;
                }
                crossed += exit_w * seg_len * s;
            }
        }
    }
    ladder *= c.boost;
    crossed *= c.boost;
}

} // namespace mcdetail

inline McPair mc_prop(const MediumParams& params, const McOptions& opt)
{
    params.validate();
    const mcdetail::Context ctx(params, opt.cap_override);
    auto est = mcdetail::run<2>(opt, [&](std::uint64_t, RngStream& rng,
                                         std::array<double, 2>& vals) {
        mcdetail::prop_sample(ctx, rng, vals[0], vals[1]);
    });
    return {est[0], est[1]};
}

inline McEstimate mc_prop_ladder(const MediumParams& p, const McOptions& o)
{
    return mc_prop(p, o).ladder;
}
inline McEstimate mc_prop_crossed(const MediumParams& p, const McOptions& o)
{
    return mc_prop(p, o).crossed;
}

// ---------------------------------------------------------------------------
// full vectorial breakdown with statistical errors

inline BistaticBreakdown mc_breakdown(const MediumParams& params, const McOptions& opt)
{
    const auto lin = mc_linear(params, opt);
    McOptions o2 = opt;
    o2.seed = opt.seed + 1;
    const auto el = mc_elastic_scatt(params, o2);
    McOptions o3 = opt;
    o3.seed = opt.seed + 2;
    const auto in = mc_inelastic(params, o3);
    McOptions o4 = opt;
    o4.seed = opt.seed + 3;
    const auto prop = mc_prop(params, o4);

    BistaticBreakdown bd;
    bd.L_el_1 = lin.ladder.mean;
    bd.C_el_1 = lin.crossed.mean;
    bd.S_el_1 = lin.ladder.mean - lin.crossed.mean; // zero in h||h by helicity flip
    bd.L_el_2_scatt = el.ladder.mean;
    bd.C_el_2_scatt = el.crossed.mean;
    bd.L_in_2 = in.ladder.mean;
    bd.C_in_2 = in.crossed.mean;
    bd.L_el_2_prop = prop.ladder.mean;
    bd.C_el_2_prop = prop.crossed.mean;
    bd.finalize_gammas();

    BistaticErrors err;
    err.L_el_1 = lin.ladder.std_error;
    err.C_el_1 = lin.crossed.std_error;
    err.L_el_2_scatt = el.ladder.std_error;
    err.C_el_2_scatt = el.crossed.std_error;
    err.L_in_2 = in.ladder.std_error;
    err.C_in_2 = in.crossed.std_error;
    err.L_el_2_prop = prop.ladder.std_error;
    err.C_el_2_prop = prop.crossed.std_error;
    const auto ratio_err = [](double num, double num_err, double den, double den_err) {
        const double r = num / den;
        return std::abs(r) * std::sqrt(num_err * num_err / (num * num) +
                                       den_err * den_err / (den * den));
    };
    const double l2 = bd.L_el_2_scatt + bd.L_in_2 + bd.L_el_2_prop;
    const double l2e = std::sqrt(err.L_el_2_scatt * err.L_el_2_scatt +
                                 err.L_in_2 * err.L_in_2 +
                                 err.L_el_2_prop * err.L_el_2_prop);
    const double c2 = bd.C_el_2_scatt + bd.C_in_2 + bd.C_el_2_prop;
    const double c2e = std::sqrt(err.C_el_2_scatt * err.C_el_2_scatt +
                                 err.C_in_2 * err.C_in_2 +
                                 err.C_el_2_prop * err.C_el_2_prop);
    err.gamma_L = ratio_err(l2, l2e, bd.L_el_1, err.L_el_1);
    err.gamma_C = ratio_err(c2, c2e, bd.C_el_1, err.C_el_1);
    err.eta_linear = ratio_err(bd.C_el_1, err.C_el_1, bd.L_el_1, err.L_el_1);
    err.eta_slope = (bd.eta_linear - 1.0) *
                    std::sqrt(err.gamma_C * err.gamma_C + err.gamma_L * err.gamma_L);
    bd.mc_errors = err;
    return bd;
}

// ---------------------------------------------------------------------------
// path statistics over the ladder ensemble (scaling with optical thickness)

struct PathMoments {
    double mean_events = 0.0;
    double mean_events_sq = 0.0;
};

inline PathMoments backscatter_path_moments(double b, std::uint64_t n_paths,
                                            std::uint64_t seed)
{
    const int cap = path_cap(b);
    double den = 0.0, num1 = 0.0, num2 = 0.0;
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        RngStream rng(seed, i);
        double z = rng.exponential();
        if (z > b)
            continue;
        for (int k = 1; k <= cap; ++k) {
            const double w = std::exp(-z);
            den += w;
            num1 += w * double(k);
            num2 += w * double(k) * double(k);
            Vec3 d;
            rng.unit_vector(d.x, d.y, d.z);
            z += rng.exponential() * d.z;
            if (z < 0.0 || z > b)
                break;
        }
    }
    return {num1 / den, num2 / den};
}

} // namespace cbs
