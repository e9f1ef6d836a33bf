#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <irka/diagnostics.hpp>
#include <irka/error.hpp>
#include <irka/io.hpp>
#include <irka/irka.hpp>
#include <irka/lti.hpp>

namespace
{

using namespace irka;

enum Exit : int
{
    ExitOk       = 0,
    ExitCheck    = 1,
    ExitMaxIter  = 2,
    ExitCycle    = 3,
    ExitInput    = 4,
    ExitInternal = 5,
};

bool json_errors = false;

int report_error(std::string_view code, const std::string& message, int exit_code)
{
    if (json_errors)
    {
        nlohmann::ordered_json j;
        j["error"]["code"]    = code;
        j["error"]["message"] = message;
        std::cerr << j.dump() << '\n';
    }
    else
    {
        std::cerr << "error: " << message << '\n';
    }
    return exit_code;
}

bool is_input_error(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::ParseError:
    case ErrorCode::UnsupportedField:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadSpec:
    case ErrorCode::NotConjugateClosed:
    case ErrorCode::EmptySet:
        return true;
    default:
        return false;
    }
}

int exit_for(const RunStatus& status)
{
    switch (status.kind)
    {
    case StatusKind::Converged:
        return ExitOk;
    case StatusKind::MaxIter:
        return ExitMaxIter;
    case StatusKind::Cycle:
        return ExitCycle;
    case StatusKind::Failed:
        return ExitInternal;
    }
    return ExitInternal;
}

struct ReduceArgs
{
    std::string a, b, c, out, csv, timings;
    std::size_t r   = 1;
    double tol      = 1e-8;
    int max_iter    = 100;
    std::string mode  = "vanilla";
    std::string alpha = "1";
    std::string stop  = "matching";
    std::string init  = "logspace";
    std::uint64_t seed = 0;
    bool verify = false;
};

IrkaConfig make_config(const ReduceArgs& args)
{
    IrkaConfig cfg;
    cfg.r        = args.r;
    cfg.tol      = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.seed     = args.seed;
    cfg.verify   = args.verify;
    cfg.update_mode = args.mode == "blended" ? UpdateMode::Blended : UpdateMode::Vanilla;
    if (args.alpha == "backoff")
    {
        cfg.alpha = AlphaSchedule::backoff();
    }
    else
    {
        try
        {
            std::size_t used = 0;
            const double a   = std::stod(args.alpha, &used);
            if (used != args.alpha.size())
            {
                throw std::invalid_argument("trailing characters");
            }
            cfg.alpha = AlphaSchedule::constant(a);
        }
        catch (const std::exception&)
        {
            throw Error(ErrorCode::InvalidArgument, "--alpha expects a number or 'backoff'");
        }
    }
    if (args.stop == "hausdorff")
    {
        cfg.stop_rule = StopRule::HausdorffThenMatching;
    }
    else if (args.stop == "certificate")
    {
        cfg.stop_rule = StopRule::Certificate;
    }
    cfg.init = args.init == "random" ? InitMode::Random : InitMode::Logspace;
    return cfg;
}

int run_reduce(const ReduceArgs& args)
{
    const auto t0  = std::chrono::steady_clock::now();
    const auto sys = io::load_system(args.a, args.b, args.c);

    io::ReportConfig rc;
    rc.a_path = args.a;
    rc.b_path = args.b;
    rc.c_path = args.c;
    rc.init   = args.init;
    rc.irka   = make_config(args);
    rc.irka.validate(static_cast<std::size_t>(sys.A.rows()));

    std::optional<ShiftSet> init;
    if (args.init != "logspace" && args.init != "random")
    {
        init = io::read_shift_file(args.init);
        if (init->size() != args.r)
        {
            throw Error(ErrorCode::DimensionMismatch,
                        "init file holds " + std::to_string(init->size()) +
                            " shifts, --r is " + std::to_string(args.r));
        }
        if (!init->is_working())
        {
            throw Error(ErrorCode::BadSpec, "init shifts must be distinct with positive real parts");
        }
    }

    const auto result = run_irka(sys, rc.irka, init);
    const auto report = io::make_report(rc, result);
    io::write_report(args.out, report);
    if (!args.csv.empty())
    {
        io::write_history_csv(report, args.csv);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!args.timings.empty())
    {
        nlohmann::ordered_json t;
        t["total_seconds"] = seconds;
        t["iterations"]    = report.history.size();
        std::ofstream f(args.timings);
        if (!(f << t.dump(2) << '\n'))
        {
            throw Error(ErrorCode::IoError, "cannot write " + args.timings);
        }
    }

    std::cout << to_string(report.status) << " after " << report.history.size()
              << " iterations\n";
    if (report.status.kind == StatusKind::Failed)
    {
        return report_error("Failed", report.status.reason, ExitInternal);
    }
    return exit_for(report.status);
}

int run_gen(Eigen::Index n, std::uint64_t seed, const std::string& preset,
            const std::string& prefix)
{
    if (n < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "--n must be positive");
    }
    const auto spec = preset == "cdlike" ? lti::SpectrumSpec::cd_like()
                                         : lti::SpectrumSpec::real_interval(1.0, 100.0, false);
    const auto sys = lti::synth_random_stable(n, seed, spec);
    io::write_matrix_market(prefix + ".A.mtx", sys.A);
    io::write_matrix_market(prefix + ".b.mtx", sys.b);
    io::write_matrix_market(prefix + ".c.mtx", sys.c);
    return ExitOk;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& report)
{
    const std::filesystem::path path(p);
    if (path.is_absolute() || std::filesystem::exists(path))
    {
        return path;
    }
    return report.parent_path() / path;
}

LtiSystem system_of(const io::RunReport& rep, const std::filesystem::path& report_path)
{
    return io::load_system(resolve(rep.config.a_path, report_path),
                           resolve(rep.config.b_path, report_path),
                           resolve(rep.config.c_path, report_path));
}

struct CheckList
{
    bool all = true;

    void operator()(const std::string& name, bool ok, double value, double bound)
    {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "  " << io::format_double(value)
                  << " <= " << io::format_double(bound) << '\n';
        all = all && ok;
    }
};

int run_diagnose(const std::string& report_path)
{
    const auto rep = io::read_report(report_path);
    if (rep.final_shifts.empty())
    {
        return report_error("EmptySet", "report has no final model", ExitInput);
    }
    const auto sys   = system_of(rep, report_path);
    const auto step  = irka_step(sys, ShiftSet::from_values(rep.final_shifts));
    const auto cert  = diag::certify(sys, step.bases, step.model);
    const auto red   = diag::backward_reduced_perturbation(step.model);
    const double tiny = 1e-10;

    CheckList check;
    if (rep.certificate)
    {
        const double scale = std::max(1.0, std::abs(cert.eps_bullet));
        check("reported eps_bullet reproduced",
              std::abs(rep.certificate->eps_bullet - cert.eps_bullet) <= 1e-8 * scale,
              std::abs(rep.certificate->eps_bullet - cert.eps_bullet), 1e-8 * scale);
    }
    if (red.eps.eps < 1.0)
    {
        check("|dq| vs eps |q|", red.bound_q_holds, red.dq_norm, red.eps.eps * red.q_norm);
    }
    if (red.eps.eps_bullet < 1.0)
    {
        check("|dq| vs eps* |q*|", red.bound_qbullet_holds, red.dq_norm,
              red.eps.eps_bullet * red.q_bullet_norm);
    }
    if (cert.valid)
    {
        const auto sb = diag::backward_system_perturbation(sys, step.bases, step.model);
        check("projection identity", sb.projection_residual <= tiny, sb.projection_residual,
              tiny);
        check("interpolation identity", sb.interpolation_residual <= 1e-8,
              sb.interpolation_residual, 1e-8);
        check("|db| bound", sb.db_norm <= sb.db_bound * (1 + tiny), sb.db_norm, sb.db_bound);
        check("|dA| bound", sb.dA_norm <= sb.dA_bound * (1 + tiny), sb.dA_norm, sb.dA_bound);
    }
    else
    {
        std::cout << "skip full-system bounds (eps* = " << io::format_double(cert.eps_bullet)
                  << ")\n";
    }
    return check.all ? ExitOk : ExitCheck;
}

int run_h2err(const std::string& report_path, const std::string& a, const std::string& b,
              const std::string& c)
{
    const auto rep = io::read_report(report_path);
    if (!rep.realified)
    {
        return report_error("EmptySet", "report has no realified model", ExitInput);
    }
    const auto sys = (a.empty() || b.empty() || c.empty()) ? system_of(rep, report_path)
                                                           : io::load_system(a, b, c);
    const double err  = lti::h2_error(sys, *rep.realified);
    const double norm = lti::h2_norm(sys);
    std::cout << "absolute " << io::format_double(err) << '\n'
              << "relative " << io::format_double(err / norm) << '\n';
    return ExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"H2 model reduction by interpolation with primitive bases"};
    app.require_subcommand(1);
    app.add_flag("--json-errors", json_errors, "Machine-readable errors on stderr");

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "Run the iteration and write a report");
    reduce->add_option("--a", ra.a, "A matrix (Matrix Market)")->required();
    reduce->add_option("--b", ra.b, "input vector")->required();
    reduce->add_option("--c", ra.c, "output vector")->required();
    reduce->add_option("--r", ra.r, "reduced order")->required();
    reduce->add_option("--tol", ra.tol);
    reduce->add_option("--max-iter", ra.max_iter);
    reduce->add_option("--mode", ra.mode)->check(CLI::IsMember({"vanilla", "blended"}));
    reduce->add_option("--alpha", ra.alpha, "blend weight or 'backoff'");
    reduce->add_option("--stop", ra.stop)
        ->check(CLI::IsMember({"matching", "hausdorff", "certificate"}));
    reduce->add_option("--init", ra.init, "logspace, random or a JSON shift file");
    reduce->add_option("--seed", ra.seed);
    reduce->add_option("--out", ra.out, "report JSON")->required();
    reduce->add_option("--csv", ra.csv, "history CSV");
    reduce->add_option("--timings", ra.timings, "wall-clock timings JSON");
    reduce->add_flag("--verify", ra.verify, "check the blend identity every iteration");

    long long gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string preset = "cdlike";
    std::string prefix;
    auto* gen = app.add_subcommand("gen", "Write a seeded synthetic system");
    gen->add_option("--n", gen_n)->required();
    gen->add_option("--seed", gen_seed);
    gen->add_option("--preset", preset)->check(CLI::IsMember({"cdlike", "diagonal"}));
    gen->add_option("--out-prefix", prefix)->required();

    std::string diag_report;
    auto* diagnose = app.add_subcommand("diagnose", "Recompute and verify certificate bounds");
    diagnose->add_option("--report", diag_report)->required();

    std::string h2_report, h2_a, h2_b, h2_c;
    auto* h2err = app.add_subcommand("h2err", "H2 error of the realified model");
    h2err->add_option("--report", h2_report)->required();
    h2err->add_option("--a", h2_a);
    h2err->add_option("--b", h2_b);
    h2err->add_option("--c", h2_c);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return report_error("ParseError", e.what(), ExitInput);
    }

    try
    {
        if (*reduce)
        {
            return run_reduce(ra);
        }
        if (*gen)
        {
            return run_gen(static_cast<Eigen::Index>(gen_n), gen_seed, preset, prefix);
        }
        if (*diagnose)
        {
            return run_diagnose(diag_report);
        }
        return run_h2err(h2_report, h2_a, h2_b, h2_c);
    }
    catch (const Error& e)
    {
        return report_error(to_string(e.code()), e.what(),
                            is_input_error(e.code()) ? ExitInput : ExitInternal);
    }
    catch (const std::exception& e)
    {
        return report_error("Internal", e.what(), ExitInternal);
    }
}
