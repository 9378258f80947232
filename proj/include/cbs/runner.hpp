#pragma once

// Reproduction driver: expands a run configuration into sweep rows using the
// quadrature, Monte-Carlo or coupled-dipole engines, with baked-in presets
// for the standard figures.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cbs/config.hpp"
#include "cbs/coupled_dipole.hpp"
#include "cbs/csv.hpp"
#include "cbs/mc_estimators.hpp"
#include "cbs/scalar_components.hpp"
#include "cbs/svg.hpp"

namespace cbs {

inline const char* preset_text(const std::string& name)
{
    if (name == "fig9")
        return "# inelastic slope components vs detuning, h||h channel\n"
               "mode = vectorial\nchannel = hparh\nb = 0.5\nsweep = delta\n"
               "values = 0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2, 2.25, 2.5, 2.75, 3\n"
               "samples = 200000\nseed = 9\nname = fig9\n";
    if (name == "fig10")
        return "# slope components vs optical thickness, scalar\n"
               "mode = scalar\ndelta = 0\nsweep = b\n"
               "values = 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2\n"
               "seed = 10\nname = fig10\n";
    if (name == "fig11")
        return "# enhancement-factor slope vs optical thickness, scalar\n"
               "mode = scalar\ndelta = 0\nsweep = b\n"
               "values = 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2\n"
               "seed = 11\nname = fig11\n";
    if (name == "fig12")
        return "# spectral enhancement factor, delta = 0\n"
               "mode = spectrum\ndelta = 0\nsweep = delta_p\nb_values = 0.5, 1, 2\n"
               "values = -4, -3.5, -3, -2.5, -2, -1.75, -1.5, -1.25, -1, -0.8, -0.6, -0.4, "
               "-0.3, -0.2, -0.15, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8, "
               "1, 1.25, 1.5, 1.75, 2, 2.5, 3, 3.5, 4\n"
               "seed = 12\nname = fig12\n";
    if (name == "fig13")
        return "# spectral enhancement factor, delta = 1\n"
               "mode = spectrum\ndelta = 1\nsweep = delta_p\nb_values = 0.5, 1, 2\n"
               "values = -3, -2.5, -2, -1.5, -1.25, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, "
               "0.7, 0.85, 0.95, 1.05, 1.15, 1.3, 1.5, 1.75, 2, 2.25, 2.5, 2.75, 3, 3.5, "
               "4, 4.5, 5\n"
               "seed = 13\nname = fig13\n";
    return nullptr;
}

namespace rundetail {

inline void breakdown_row(ResultRow& row, const BistaticBreakdown& bd, double s_eff)
{
    const BistaticErrors err = bd.mc_errors.value_or(BistaticErrors{});
    row.add("L_el_1", bd.L_el_1);
    row.add("err_L_el_1", err.L_el_1);
    row.add("C_el_1", bd.C_el_1);
    row.add("err_C_el_1", err.C_el_1);
    row.add("S_el_1", bd.S_el_1);
    row.add("L_el_2_scatt", bd.L_el_2_scatt);
    row.add("err_L_el_2_scatt", err.L_el_2_scatt);
    row.add("C_el_2_scatt", bd.C_el_2_scatt);
    row.add("err_C_el_2_scatt", err.C_el_2_scatt);
    row.add("L_in_2", bd.L_in_2);
    row.add("err_L_in_2", err.L_in_2);
    row.add("C_in_2", bd.C_in_2);
    row.add("err_C_in_2", err.C_in_2);
    row.add("L_el_2_prop", bd.L_el_2_prop);
    row.add("err_L_el_2_prop", err.L_el_2_prop);
    row.add("C_el_2_prop", bd.C_el_2_prop);
    row.add("err_C_el_2_prop", err.C_el_2_prop);
    row.add("gamma_L", bd.gamma_L);
    row.add("err_gamma_L", err.gamma_L);
    row.add("gamma_C", bd.gamma_C);
    row.add("err_gamma_C", err.gamma_C);
    row.add("gamma_L_el", bd.gamma_L_elastic());
    row.add("gamma_C_el", bd.gamma_C_elastic());
    row.add("gamma_L_in", bd.gamma_L_inelastic());
    row.add("gamma_C_in", bd.gamma_C_inelastic());
    row.add("eta_linear", bd.eta_linear);
    row.add("err_eta_linear", err.eta_linear);
    row.add("eta_slope", bd.eta_slope);
    row.add("err_eta_slope", err.eta_slope);
    row.add("eta_at_s", bd.eta(s_eff));
}

inline MediumParams point_params(const RunConfig& cfg, double axis_value)
{
    MediumParams p = cfg.medium;
    switch (cfg.sweep) {
    case SweepAxis::B: p.b = axis_value; break;
    case SweepAxis::Delta: p.detuning.v = axis_value; break;
    case SweepAxis::S: p.s0 = axis_value; break;
    case SweepAxis::DeltaP: break;
    }
    return p;
}

} // namespace rundetail

using RowSink = std::function<void(const ResultRow&)>;

inline std::vector<ResultRow> run_figure(const RunConfig& cfg, const RowSink& sink = {})
{
    std::vector<ResultRow> rows;
    const auto push = [&](const ResultRow& row) {
        rows.push_back(row);
        if (sink)
            sink(row);
    };

    if (cfg.medium.s0 * cfg.medium.b * cfg.medium.b > 0.1)
        std::fprintf(stderr,
                     "warning: s0 b^2 = %g exceeds 0.1; the first-order expansion is "
                     "outside its validity domain\n",
                     cfg.medium.s0 * cfg.medium.b * cfg.medium.b);
    if (!cfg.medium.dilute())
        std::fprintf(stderr,
                     "warning: k ell = %g is small; the dilute-medium assumption "
                     "k ell >> 1 is strained\n",
                     cfg.medium.klf);

    const auto annotated = [&](std::size_t i, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep point " + std::to_string(i) + " (" +
                                     to_string(cfg.sweep) + " = " +
                                     format_real(cfg.values[i]) + "): " + e.what());
        }
    };

    switch (cfg.mode) {
    case RunMode::Scalar: {
        for (std::size_t i = 0; i < cfg.values.size(); ++i)
            annotated(i, [&] {
                MediumParams p = rundetail::point_params(cfg, cfg.values[i]);
                p.validate();
                const auto bd = assemble(p, SlabGrid::uniform(p.b, cfg.grid_n));
                ResultRow row;
                row.add("b", p.b);
                row.add("delta", p.detuning.v);
                row.add("s0", p.s0);
                row.add("channel", 0.0);
                rundetail::breakdown_row(row, bd, saturation(p.detuning, p.s0));
                push(row);
            });
        break;
    }
    case RunMode::Vectorial: {
        for (std::size_t i = 0; i < cfg.values.size(); ++i)
            annotated(i, [&] {
                MediumParams p = rundetail::point_params(cfg, cfg.values[i]);
                p.validate();
                McOptions opt{cfg.n_samples, cfg.seed + 1000 * i, cfg.workers, 0};
                const auto bd = mc_breakdown(p, opt);
                ResultRow row;
                row.add("b", p.b);
                row.add("delta", p.detuning.v);
                row.add("s0", p.s0);
                row.add("channel", p.channel == Channel::HParallelH ? 1.0 : 0.0);
                rundetail::breakdown_row(row, bd, saturation(p.detuning, p.s0));
                push(row);
            });
        break;
    }
    case RunMode::Spectrum: {
        const std::vector<double> bs =
            cfg.b_values.empty() ? std::vector<double>{cfg.medium.b} : cfg.b_values;
        for (double b : bs) {
            MediumParams p = cfg.medium;
            p.b = b;
            p.validate();
            if (p.channel == Channel::Scalar) {
                const auto curve =
                    spectral_enhancement(p, SlabGrid::uniform(b, cfg.grid_n), cfg.values);
                for (std::size_t i = 0; i < curve.delta_p.size(); ++i) {
                    ResultRow row;
                    row.add("b", b);
                    row.add("delta", p.detuning.v);
                    row.add("delta_p", curve.delta_p[i]);
                    row.add("ladder_density", curve.ladder_density[i]);
                    row.add("err_ladder_density", 0.0);
                    row.add("crossed_density", curve.crossed_density[i]);
                    row.add("err_crossed_density", 0.0);
                    row.add("eta", curve.eta[i]);
                    row.add("err_eta", 0.0);
                    push(row);
                }
            } else {
                for (std::size_t i = 0; i < cfg.values.size(); ++i) {
                    const Detuning dp{cfg.values[i]};
                    McOptions opt{cfg.n_samples, cfg.seed + 1000 * i, cfg.workers, 0};
                    const auto dens = mc_spectral_density(p, dp, opt);
                    const double pw = inelastic_spectrum(p.detuning, dp);
                    const double eta = dens.ladder.mean > 0.0
                                           ? 1.0 + dens.crossed.mean / dens.ladder.mean
                                           : std::numeric_limits<double>::quiet_NaN();
                    double eta_err = std::numeric_limits<double>::quiet_NaN();
                    if (dens.ladder.mean > 0.0) {
                        const double r = dens.crossed.mean / dens.ladder.mean;
                        eta_err = std::abs(r) *
                                  std::sqrt(std::pow(dens.crossed.std_error /
                                                         dens.crossed.mean, 2) +
                                            std::pow(dens.ladder.std_error /
                                                         dens.ladder.mean, 2));
                    }
                    ResultRow row;
                    row.add("b", b);
                    row.add("delta", p.detuning.v);
                    row.add("delta_p", dp.v);
                    row.add("ladder_density", pw * dens.ladder.mean);
                    row.add("err_ladder_density", pw * dens.ladder.std_error);
                    row.add("crossed_density", pw * dens.crossed.mean);
                    row.add("err_crossed_density", pw * dens.crossed.std_error);
                    row.add("eta", eta);
                    row.add("err_eta", eta_err);
                    push(row);
                }
            }
        }
        break;
    }
    case RunMode::Classical: {
        DipoleConfig dc;
        dc.n_atoms = cfg.atoms;
        dc.b = cfg.medium.b;
        dc.kl = cfg.kl;
        dc.s_values = cfg.values;
        dc.realizations = cfg.realizations;
        dc.seed = cfg.seed;
        dc.workers = cfg.workers;
        const auto sweep = ensemble_backscatter_sweep(dc);
        for (std::size_t k = 0; k < sweep.s.size(); ++k) {
            ResultRow row;
            row.add("s", sweep.s[k]);
            row.add("b", dc.b);
            row.add("enhanced", sweep.enhanced[k].mean);
            row.add("err_enhanced", sweep.enhanced[k].std_error);
            row.add("background", sweep.reference[k].mean);
            row.add("err_background", sweep.reference[k].std_error);
            row.add("ladder_sum", sweep.ladder[k].mean);
            row.add("crossed", sweep.crossed[k].mean);
            row.add("err_crossed", sweep.crossed[k].std_error);
            row.add("specular", sweep.specular[k]);
            row.add("crossed_slope", sweep.crossed_slope.mean);
            row.add("err_crossed_slope", sweep.crossed_slope.std_error);
            row.add("klf", sweep.klf);
            push(row);
        }
        break;
    }
    }
    return rows;
}

// standard plot of a finished sweep
inline std::string figure_svg(const RunConfig& cfg, const std::vector<ResultRow>& rows,
                              const std::string& title)
{
    const auto column = [&](const std::string& name) {
        std::vector<double> out;
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.names.size(); ++i)
                if (row.names[i] == name)
                    out.push_back(row.values[i]);
        return out;
    };

    std::vector<PlotSeries> series;
    std::string xlabel, ylabel;
    if (cfg.mode == RunMode::Spectrum) {
        xlabel = "delta_p";
        ylabel = "eta";
        const auto bcol = column("b");
        const auto x = column("delta_p");
        const auto y = column("eta");
        std::vector<double> bs;
        for (double b : bcol)
            if (std::find(bs.begin(), bs.end(), b) == bs.end())
                bs.push_back(b);
        for (double b : bs) {
            PlotSeries s;
            s.label = "b = " + svgdetail::num(b);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (bcol[i] == b) {
                    s.x.push_back(x[i]);
                    s.y.push_back(y[i]);
                }
            series.push_back(s);
        }
    } else if (cfg.mode == RunMode::Classical) {
        xlabel = "s";
        ylabel = "gamma";
        series.push_back({"crossed", column("s"), column("crossed")});
        series.push_back({"background", column("s"), column("background")});
    } else if (cfg.name == "fig11") {
        xlabel = to_string(cfg.sweep);
        ylabel = "d eta / d s";
        series.push_back({"eta_slope", column(to_string(cfg.sweep)), column("eta_slope")});
    } else {
        xlabel = to_string(cfg.sweep);
        ylabel = "gamma";
        const auto x = column(to_string(cfg.sweep));
        series.push_back({"gamma_L_in", x, column("gamma_L_in")});
        series.push_back({"gamma_C_in", x, column("gamma_C_in")});
        series.push_back({"gamma_L_el", x, column("gamma_L_el")});
        series.push_back({"gamma_C_el", x, column("gamma_C_el")});
    }
    return emit_svg(series, title, xlabel, ylabel);
}

} // namespace cbs
