// rowiso command-line driver: scenario ingestion, verification batteries,
// kernel/series dumps and d=1 boundary sampling.
//
// Scenario kinds and their pipelines:
//   dilation  row contraction blocks -> rotation colligation -> dilation
//   raw       explicit coisometric colligation -> dilation
//   lifting   (S, Q, R) or (T, dimS) -> gamma extraction -> lifting geometry
//   markov    interaction unitary -> chain-space row isometry
// Every command ends in the same verification battery; kind-specific commands
// add their module checks on top.  Reports are JSON with sorted keys, so a
// fixed scenario and flag set produces byte-identical output under --no-meta.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rowiso/characteristic.hpp"
#include "rowiso/io.hpp"
#include "rowiso/kernel.hpp"
#include "rowiso/lifting.hpp"
#include "rowiso/markov.hpp"
#include "rowiso/transfer.hpp"

namespace {

using rowiso::CMatrix;
using rowiso::Complex;
using rowiso::Tolerance;
using rowiso::Word;
using json = nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct Options {
    std::string scenario_path;
    std::string out;
    int depth = -1;    // -1: take the scenario value
    int degree = -1;
    double tol = -1.0;
    int samples = 64;
    double radius = 0.99;
    bool no_meta = false;
};

// Everything the checks need, assembled once per scenario.
struct Pipeline {
    rowiso::io::Scenario scenario;
    Tolerance tol;
    int depth = 4;
    int degree = 4;
    rowiso::RowIsometryTrunc v;
    rowiso::Embedding i0, j0;
    rowiso::SystemMatrix sys;  // module route, independent of (v, i0, j0)
    std::optional<rowiso::LiftingModel> lifting;
    std::optional<rowiso::Interaction> interaction;
};

std::string format_complex(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

Pipeline build_pipeline(const Options& opt) {
    rowiso::io::Scenario sc = rowiso::io::load_scenario(opt.scenario_path);
    if (opt.depth > 0) sc.depth = opt.depth;
    if (opt.degree >= 0) sc.degree = opt.degree;
    if (opt.tol > 0.0) sc.tol = opt.tol;
    const Tolerance tol{sc.tol};
    const int depth = sc.depth, degree = sc.degree;

    if (sc.kind == "dilation") {
        const rowiso::RowContraction t = rowiso::io::contraction_from_payload(sc.payload);
        rowiso::DilationTriple dt = rowiso::nagy_foias_dilation(t, depth, tol);
        rowiso::SystemMatrix sys = rowiso::rotation_system(t, tol);
        return Pipeline{std::move(sc), tol, depth, degree,
                        std::move(dt.v), std::move(dt.i0), std::move(dt.j0),
                        std::move(sys), std::nullopt, std::nullopt};
    }
    if (sc.kind == "raw") {
        rowiso::SystemMatrix sys = rowiso::io::system_from_payload(sc.payload);
        rowiso::DilationResult dr = rowiso::dilation_row_isometry(sys, depth, tol);
        rowiso::Embedding j0 = rowiso::sigma_output_embedding(dr.v.space, sys, tol);
        return Pipeline{std::move(sc), tol, depth, degree,
                        std::move(dr.v), std::move(dr.i0), std::move(j0),
                        std::move(sys), std::nullopt, std::nullopt};
    }
    if (sc.kind == "lifting") {
        const rowiso::LiftingSplit split = rowiso::io::lifting_from_payload(sc.payload, tol);
        const CMatrix gamma = rowiso::extract_gamma(split, tol);
        rowiso::LiftingModel model = rowiso::lifting_system(split, gamma, tol);
        rowiso::DilationTriple dt = rowiso::lifting_geometry(split, gamma, depth, tol);
        rowiso::SystemMatrix sys = model.sys;
        return Pipeline{std::move(sc), tol, depth, degree,
                        std::move(dt.v), std::move(dt.i0), std::move(dt.j0),
                        std::move(sys), std::move(model), std::nullopt};
    }
    // markov: a chain of depth+1 slots realizes graded depth `depth`.
    rowiso::Interaction inter = rowiso::io::interaction_from_json(sc.payload);
    rowiso::MarkovDilation md = rowiso::markov_row_isometry(inter, depth + 1, tol);
    rowiso::SystemMatrix sys = rowiso::markov_system(inter, tol);
    return Pipeline{std::move(sc), tol, depth, degree,
                    std::move(md.v), std::move(md.i0), std::move(md.j0),
                    std::move(sys), std::nullopt, std::move(inter)};
}

json check_record(const std::string& name, bool pass, double max_dev, const std::string& witness) {
    return json{{"name", name}, {"pass", pass}, {"max_dev", max_dev}, {"witness", witness}};
}

json skip_record(const std::string& name, const std::string& reason) {
    return json{{"name", name}, {"skipped", reason}};
}

// The battery shared by every command: isometry relations, wandering input
// space, Toeplitz structure, the six analyticity conditions, the realization
// cross-check and the contractivity sweeps.
json run_verify_checks(Pipeline& p) {
    json checks = json::array();
    const int d = p.v.d();

    {
        const rowiso::RowIsometryReport rep = rowiso::check_row_isometry(p.v);
        checks.push_back(check_record("row_isometry", rep.max_dev <= p.tol.atol, rep.max_dev,
                                      "generator pair (" + std::to_string(rep.worst_left) + ", " +
                                          std::to_string(rep.worst_right) + ")"));
    }
    {
        const rowiso::WanderingReport rep = rowiso::is_wandering(p.v, p.i0, p.depth, p.tol);
        checks.push_back(check_record("u0_wandering", rep.wandering, rep.max_dev,
                                      "words (" + rep.witness_a.str() + ", " + rep.witness_b.str() +
                                          ")"));
    }

    rowiso::ToeplitzKernel kernel(p.v, p.i0, p.j0, p.tol);
    const int maxlen = std::min(kernel.budget_u(), kernel.budget_y());
    {
        const rowiso::StructureReport rep = rowiso::verify_toeplitz_structure(kernel, maxlen, p.tol);
        checks.push_back(check_record("toeplitz_structure", rep.pass, rep.max_dev,
                                      "words (" + rep.worst_sigma.str() + ", " +
                                          rep.worst_omega.str() + ")"));
    }
    {
        const rowiso::BatteryReport rep = rowiso::analyticity_battery(kernel, maxlen, p.tol);
        for (int i = 1; i <= 6; ++i) {
            const rowiso::ConditionReport& c = rep.cond(i);
            checks.push_back(check_record("battery_c" + std::to_string(i), c.pass, c.max_dev,
                                          c.witness ? "word " + c.witness->str() : ""));
        }
    }
    {
        const rowiso::RealizationReport rep =
            rowiso::verify_realization(p.v, p.i0, p.j0, std::min(p.degree, maxlen), p.tol);
        checks.push_back(check_record("realization", rep.pass, rep.max_dev,
                                      "word " + rep.worst.str()));
    }
    {
        const double worst = rowiso::max_entry_norm(kernel, maxlen);
        checks.push_back(check_record("entry_contractivity", worst <= 1.0 + p.tol.atol,
                                      std::max(0.0, worst - 1.0), "largest entry norm over the table"));
    }
    try {
        const CMatrix m = rowiso::toeplitz_matrix(kernel, maxlen, p.tol);
        const double norm = rowiso::spectral_norm(m);
        checks.push_back(check_record("compression_contractivity", norm <= 1.0 + p.tol.atol,
                                      std::max(0.0, norm - 1.0),
                                      "compression to translates of length <= " +
                                          std::to_string(maxlen)));
    } catch (const rowiso::YNotWandering&) {
        checks.push_back(skip_record("compression_contractivity",
                                     "output translates are not orthonormal"));
    }
    if (d == 1) {
        double worst = 0.0;
        Complex worst_z = 0.0;
        for (int j = 0; j < 16; ++j) {
            const double angle = 2.0 * kPi * j / 16.0;
            const Complex z = 0.9 * Complex(std::cos(angle), std::sin(angle));
            const double norm = rowiso::spectral_norm(rowiso::eval_theta(p.sys, z, p.tol));
            if (norm > worst) { worst = norm; worst_z = z; }
        }
        checks.push_back(check_record("theta_contractivity", worst <= 1.0 + p.tol.atol,
                                      std::max(0.0, worst - 1.0), "z = " + format_complex(worst_z)));
    } else {
        checks.push_back(skip_record("theta_contractivity", "single-variable evaluation only"));
    }
    return checks;
}

void append_lifting_checks(Pipeline& p, json& checks) {
    const rowiso::LiftingModel& m = *p.lifting;
    {
        // gamma explains the coupling row: rebuild Q from it.
        const CMatrix rebuilt = m.bottom.defect_star * m.bottom.range_star * m.gamma.adjoint() *
                                m.top.range.adjoint() * m.top.defect;
        const double dev = rowiso::max_abs(CMatrix(rebuilt - m.split.q_row()));
        checks.push_back(check_record("gamma_roundtrip", dev <= p.tol.scaled(m.split.dim()), dev,
                                      "coupling row rebuilt from gamma"));
    }
    if (m.split.d == 1) {
        std::vector<Complex> zs;
        for (int j = 0; j < 5; ++j) {
            const double angle = 2.0 * kPi * j / 5.0;
            zs.push_back(0.7 * Complex(std::cos(angle), std::sin(angle)));
        }
        const rowiso::RestrictionReport rep = rowiso::verify_restrictions(m, zs, p.tol);
        checks.push_back(check_record("restrictions", rep.pass,
                                      std::max(rep.max_dev_r, rep.max_dev_s),
                                      "z = " + format_complex(rep.worst_z)));
    } else {
        checks.push_back(skip_record("restrictions", "single-variable evaluation only"));
    }
    {
        const rowiso::SystemMatrix geo = rowiso::system_matrix(p.v, p.i0, p.j0, p.tol);
        const double dev = rowiso::series_max_dev(rowiso::formal_series(m.sys, p.degree),
                                                  rowiso::formal_series(geo, p.degree));
        checks.push_back(check_record("series_two_route", dev <= p.tol.atol, dev,
                                      "algebraic vs geometric colligation"));
    }
}

void append_markov_checks(Pipeline& p, json& checks) {
    const rowiso::Interaction& inter = *p.interaction;
    {
        rowiso::ToeplitzKernel kernel(p.v, p.i0, p.j0, p.tol);
        double worst = 0.0;
        Word worst_word;
        for (const Word& a : rowiso::words_up_to(inter.d(), p.depth)) {
            const double dev = rowiso::max_abs(
                CMatrix(rowiso::series_coefficient(p.sys, a) - kernel.entry(a, Word::empty())));
            if (dev > worst) { worst = dev; worst_word = a; }
        }
        checks.push_back(check_record("coefficients_two_path", worst <= p.tol.atol, worst,
                                      "word " + worst_word.str()));
    }
    {
        // Wandering-subspace certificate for H_S = span Omega_H with the
        // canonical Y_0 from the construction.
        const int slots = p.depth + 1;
        CMatrix hs = CMatrix(*inter.omega_h);
        const Eigen::Index pp = inter.dim_p;
        CMatrix pperp = rowiso::complete_to_unitary(*inter.omega_p, p.tol).rightCols(pp - 1);
        CMatrix y1 = inter.u.adjoint() * rowiso::kron(CMatrix(*inter.omega_h), CMatrix(pperp));
        CMatrix y0 = y1;
        for (int j = 1; j < slots; ++j) y0 = rowiso::detail::append_vacuum(*inter.omega_k, y0);
        const rowiso::PropReport rep =
            rowiso::prop_wandering_check(inter, hs, y0, slots, p.tol);
        checks.push_back(check_record("prop_hypothesis", rep.hypothesis.pass, rep.hypothesis.max_dev,
                                      rep.hypothesis.witness));
        checks.push_back(check_record("prop_containment", rep.containment.pass,
                                      rep.containment.max_dev, rep.containment.witness));
        checks.push_back(check_record("prop_wandering", rep.wandering.pass, rep.wandering.max_dev,
                                      rep.wandering.witness));
    }
}

json series_summary(const rowiso::FormalSeries& f) {
    double worst = 0.0;
    for (const CMatrix& c : f.coeffs) worst = std::max(worst, rowiso::spectral_norm(c));
    return json{{"d", f.d},
                {"degree", f.degree},
                {"coefficients", f.coeffs.size()},
                {"max_coeff_norm", worst}};
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(opt.out);
    if (!out) throw rowiso::ValidationError("cannot open output file '" + opt.out + "'");
    out << text << "\n";
}

using Clock = std::chrono::steady_clock;

int finish_report(const Options& opt, const std::string& command, Pipeline& p, json checks,
                  Clock::time_point started, bool full_series) {
    json report{{"command", command}, {"scenario", p.scenario.echo}, {"checks", checks}};
    const rowiso::FormalSeries series = rowiso::formal_series(p.sys, p.degree);
    report["series"] = full_series ? rowiso::io::series_to_json(series) : series_summary(series);
    bool ok = true;
    for (const json& c : checks)
        if (c.contains("pass") && !c.at("pass").get<bool>()) ok = false;
    if (!opt.no_meta) {
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
        report["timing"] = json{{"elapsed_ms", elapsed.count()}};
    }
    emit(opt, report.dump(2));
    return ok ? 0 : 1;
}

int cmd_verify(const Options& opt) {
    const auto started = Clock::now();
    Pipeline p = build_pipeline(opt);
    return finish_report(opt, "verify", p, run_verify_checks(p), started, false);
}

int cmd_characteristic(const Options& opt) {
    const auto started = Clock::now();
    Pipeline p = build_pipeline(opt);
    if (p.scenario.kind != "dilation" && p.scenario.kind != "raw")
        throw rowiso::ValidationError("characteristic: scenario kind must be dilation or raw");
    return finish_report(opt, "characteristic", p, run_verify_checks(p), started, true);
}

int cmd_lifting(const Options& opt) {
    const auto started = Clock::now();
    Pipeline p = build_pipeline(opt);
    if (!p.lifting) throw rowiso::ValidationError("lifting: scenario kind must be lifting");
    json checks = run_verify_checks(p);
    append_lifting_checks(p, checks);
    return finish_report(opt, "lifting", p, std::move(checks), started, false);
}

int cmd_markov(const Options& opt) {
    const auto started = Clock::now();
    Pipeline p = build_pipeline(opt);
    if (!p.interaction) throw rowiso::ValidationError("markov: scenario kind must be markov");
    json checks = run_verify_checks(p);
    append_markov_checks(p, checks);
    return finish_report(opt, "markov", p, std::move(checks), started, false);
}

int cmd_kernel(const Options& opt) {
    Pipeline p = build_pipeline(opt);
    rowiso::ToeplitzKernel kernel(p.v, p.i0, p.j0, p.tol);
    const int maxlen = std::min({kernel.budget_u(), kernel.budget_y(), p.depth});
    kernel.tabulate(maxlen);
    json entries = json::array();
    const std::vector<Word> words = rowiso::words_up_to(p.v.space.d, maxlen);
    for (const Word& sigma : words)
        for (const Word& omega : words)
            entries.push_back(json{{"sigma", sigma.str()},
                                   {"omega", omega.str()},
                                   {"matrix", rowiso::io::matrix_to_json(kernel.entry(sigma, omega))}});
    json doc{{"command", "kernel"}, {"scenario", p.scenario.echo}, {"maxlen", maxlen},
             {"entries", std::move(entries)}};
    emit(opt, doc.dump(2));
    return 0;
}

int cmd_series(const Options& opt) {
    Pipeline p = build_pipeline(opt);
    json doc{{"command", "series"}, {"scenario", p.scenario.echo},
             {"series", rowiso::io::series_to_json(rowiso::formal_series(p.sys, p.degree))}};
    emit(opt, doc.dump(2));
    return 0;
}

int cmd_eval(const Options& opt) {
    Pipeline p = build_pipeline(opt);
    if (p.sys.d != 1)
        throw rowiso::ValidationError("eval: boundary sampling needs a single-variable scenario");
    std::ostringstream csv;
    csv << "theta_index,z_re,z_im";
    const Eigen::Index svs = std::min(p.sys.dim_y(), p.sys.dim_u());
    for (Eigen::Index i = 0; i < svs; ++i) csv << ",sv" << (i + 1);
    csv << "\n";
    csv.precision(17);
    for (int j = 0; j < opt.samples; ++j) {
        const double angle = 2.0 * kPi * j / opt.samples;
        const Complex z = opt.radius * Complex(std::cos(angle), std::sin(angle));
        const CMatrix theta = rowiso::eval_theta(p.sys, z, p.tol);
        Eigen::JacobiSVD<CMatrix> svd(theta);
        csv << j << "," << z.real() << "," << z.imag();
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            csv << "," << svd.singularValues()(i);
        csv << "\n";
    }
    emit(opt, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"row isometries, multi-Toeplitz kernels and transfer functions"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--depth", opt.depth, "truncation depth (overrides the scenario)");
        cmd->add_option("--degree", opt.degree, "series degree (overrides the scenario)");
        cmd->add_option("--tol", opt.tol, "tolerance (overrides the scenario)");
        cmd->add_option("--out", opt.out, "write the artifact to this path instead of stdout");
        cmd->add_flag("--no-meta", opt.no_meta, "omit timing metadata for byte-stable output");
        return cmd;
    };

    CLI::App* verify = add_common(app.add_subcommand("verify", "full verification battery"));
    CLI::App* kernel = add_common(app.add_subcommand("kernel", "dump the kernel table"));
    CLI::App* series = add_common(app.add_subcommand("series", "dump transfer coefficients"));
    CLI::App* eval = add_common(app.add_subcommand("eval", "sample Theta on a circle (d = 1)"));
    eval->add_option("--samples", opt.samples, "number of sample points")->check(CLI::PositiveNumber);
    eval->add_option("--radius", opt.radius, "sampling radius inside the disc");
    CLI::App* characteristic =
        add_common(app.add_subcommand("characteristic", "characteristic function pipeline"));
    CLI::App* lifting = add_common(app.add_subcommand("lifting", "lifting pipeline"));
    CLI::App* markov = add_common(app.add_subcommand("markov", "interaction pipeline"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(opt);
        if (kernel->parsed()) return cmd_kernel(opt);
        if (series->parsed()) return cmd_series(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (characteristic->parsed()) return cmd_characteristic(opt);
        if (lifting->parsed()) return cmd_lifting(opt);
        if (markov->parsed()) return cmd_markov(opt);
    } catch (const rowiso::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
