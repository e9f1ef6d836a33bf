#include <irka/io.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <irka/error.hpp>

namespace irka::io
{

using json = nlohmann::ordered_json;

namespace
{

std::vector<std::string_view> tokenize(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size())
    {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
        {
            ++i;
        }
        const std::size_t j = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
        {
            ++i;
        }
        if (i > j)
        {
            out.push_back(line.substr(j, i - j));
        }
    }
    return out;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what)
{
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view tok, const std::filesystem::path& path, std::size_t line)
{
    if (!tok.empty() && tok.front() == '+')
    {
        tok.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
    {
        parse_fail(path, line, "expected a finite real number, got '" + std::string(tok) + "'");
    }
    return v;
}

long long parse_int(std::string_view tok, const std::filesystem::path& path, std::size_t line)
{
    long long v    = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    {
        parse_fail(path, line, "expected an integer, got '" + std::string(tok) + "'");
    }
    return v;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << text;
    out.flush();
    if (!out)
    {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

json num(double v)
{
    if (std::isfinite(v))
    {
        return v + 0.0; // no signed zeros in the output
    }
    return format_double(v);
}

double to_num(const json& j)
{
    if (j.is_string())
    {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf")
        {
            return infinity;
        }
        if (s == "-inf")
        {
            return -infinity;
        }
        if (s == "nan")
        {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw Error(ErrorCode::ParseError, "unexpected numeric token '" + s + "'");
    }
    if (!j.is_number())
    {
        throw Error(ErrorCode::ParseError, "expected a number in report");
    }
    return j.get<double>();
}

json complex_list(const std::vector<Complex>& z)
{
    json out = json::array();
    for (const auto& v : z)
    {
        out.push_back(json::array({num(v.real()), num(v.imag())}));
    }
    return out;
}

std::vector<Complex> to_complex_list(const json& j)
{
    if (!j.is_array())
    {
        throw Error(ErrorCode::ParseError, "expected an array of [re, im] pairs");
    }
    std::vector<Complex> out;
    for (const auto& e : j)
    {
        if (!e.is_array() || e.size() != 2)
        {
            throw Error(ErrorCode::ParseError, "expected [re, im]");
        }
        out.emplace_back(to_num(e[0]), to_num(e[1]));
    }
    return out;
}

std::string mode_name(UpdateMode m)
{
    return m == UpdateMode::Vanilla ? "vanilla" : "blended";
}

std::string stop_name(StopRule s)
{
    switch (s)
    {
    case StopRule::Matching:
        return "matching";
    case StopRule::HausdorffThenMatching:
        return "hausdorff";
    case StopRule::Certificate:
        return "certificate";
    }
    return "matching";
}

StopRule parse_stop(const std::string& s)
{
    if (s == "matching")
    {
        return StopRule::Matching;
    }
    if (s == "hausdorff")
    {
        return StopRule::HausdorffThenMatching;
    }
    if (s == "certificate")
    {
        return StopRule::Certificate;
    }
    throw Error(ErrorCode::ParseError, "unknown stop rule '" + s + "'");
}

RunStatus parse_status(const std::string& s)
{
    if (s == "Converged")
    {
        return {StatusKind::Converged, 0, {}};
    }
    if (s == "MaxIter")
    {
        return {StatusKind::MaxIter, 0, {}};
    }
    if (s.rfind("Cycle(", 0) == 0 && s.back() == ')')
    {
        return {StatusKind::Cycle, std::stoi(s.substr(6, s.size() - 7)), {}};
    }
    if (s.rfind("Failed(", 0) == 0 && s.back() == ')')
    {
        return {StatusKind::Failed, 0, s.substr(7, s.size() - 8)};
    }
    throw Error(ErrorCode::ParseError, "unknown status '" + s + "'");
}

json certificate_json(const BackwardCertificate& c)
{
    json j;
    j["eps"]        = num(c.eps);
    j["eps_bullet"] = num(c.eps_bullet);
    j["db_bound"]   = num(c.db_bound);
    j["dA_bound"]   = num(c.dA_bound);
    j["kappa_C"]    = num(c.kappa_C);
    j["kappa_V"]    = num(c.kappa_V);
    j["cos_angle"]  = num(c.cos_angle);
    j["q_norm"]     = num(c.q_norm);
    j["valid"]      = c.valid;
    j["dq_norm_bound_q"]       = num(c.dq_norm_bound_q);
    j["dq_norm_bound_qbullet"] = num(c.dq_norm_bound_qbullet);
    j["dAr_bound"]  = num(c.dAr_bound);
    json eta        = json::array();
    for (double v : c.eta)
    {
        eta.push_back(num(v));
    }
    j["eta"] = eta;
    return j;
}

BackwardCertificate certificate_from(const json& j)
{
    BackwardCertificate c;
    c.eps        = to_num(j.at("eps"));
    c.eps_bullet = to_num(j.at("eps_bullet"));
    c.db_bound   = to_num(j.at("db_bound"));
    c.dA_bound   = to_num(j.at("dA_bound"));
    c.kappa_C    = to_num(j.at("kappa_C"));
    c.kappa_V    = to_num(j.at("kappa_V"));
    c.cos_angle  = to_num(j.at("cos_angle"));
    c.q_norm     = to_num(j.at("q_norm"));
    c.valid      = j.at("valid").get<bool>();
    c.dq_norm_bound_q       = to_num(j.at("dq_norm_bound_q"));
    c.dq_norm_bound_qbullet = to_num(j.at("dq_norm_bound_qbullet"));
    c.dAr_bound  = to_num(j.at("dAr_bound"));
    for (const auto& v : j.at("eta"))
    {
        c.eta.push_back(to_num(v));
    }
    return c;
}

json record_json(const IterationRecord& r)
{
    json j;
    j["k"]          = r.k;
    j["d"]          = num(r.d);
    j["h"]          = num(r.h);
    j["q_norm"]     = num(r.q_norm);
    j["kappa_C"]    = num(r.kappa_C);
    j["kappa_V"]    = num(r.kappa_V);
    j["cos_angle"]  = num(r.cos_angle);
    j["eps"]        = num(r.eps);
    j["eps_bullet"] = num(r.eps_bullet);
    j["flipped"]    = r.flipped;
    j["alpha_used"] = num(r.alpha_used);
    j["cond_L"]     = num(r.cond_L);
    j["companion_residual"]     = num(r.companion_residual);
    j["eigvec_residual"]        = num(r.eigvec_residual);
    j["hermite_value_residual"] = num(r.hermite_value_residual);
    j["hermite_deriv_residual"] = num(r.hermite_deriv_residual);
    j["kv_residual"]    = num(r.kv_residual);
    j["degenerate_q"]   = r.degenerate_q;
    j["unstable_poles"] = r.unstable_poles;
    j["eps_collapsed"]  = r.eps_collapsed;
    j["sigma_in"]       = complex_list(r.sigma_in.values());
    j["mu_out"]         = complex_list(r.mu_out);
    return j;
}

IterationRecord record_from(const json& j)
{
    IterationRecord r;
    r.k          = j.at("k").get<int>();
    r.d          = to_num(j.at("d"));
    r.h          = to_num(j.at("h"));
    r.q_norm     = to_num(j.at("q_norm"));
    r.kappa_C    = to_num(j.at("kappa_C"));
    r.kappa_V    = to_num(j.at("kappa_V"));
    r.cos_angle  = to_num(j.at("cos_angle"));
    r.eps        = to_num(j.at("eps"));
    r.eps_bullet = to_num(j.at("eps_bullet"));
    r.flipped    = j.at("flipped").get<int>();
    r.alpha_used = to_num(j.at("alpha_used"));
    r.cond_L     = to_num(j.at("cond_L"));
    r.companion_residual     = to_num(j.at("companion_residual"));
    r.eigvec_residual        = to_num(j.at("eigvec_residual"));
    r.hermite_value_residual = to_num(j.at("hermite_value_residual"));
    r.hermite_deriv_residual = to_num(j.at("hermite_deriv_residual"));
    r.kv_residual    = to_num(j.at("kv_residual"));
    r.degenerate_q   = j.at("degenerate_q").get<bool>();
    r.unstable_poles = j.at("unstable_poles").get<bool>();
    r.eps_collapsed  = j.at("eps_collapsed").get<bool>();
    const auto sig   = to_complex_list(j.at("sigma_in"));
    r.sigma_in       = ShiftSet::from_values(sig);
    r.mu_out         = to_complex_list(j.at("mu_out"));
    return r;
}

json matrix_json(const RMatrix& M)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
        {
            row.push_back(num(M(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const RVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        out.push_back(num(v(i)));
    }
    return out;
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

RMatrix read_matrix_market(const std::filesystem::path& path)
{
    const std::string text = slurp(path);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line))
    {
        parse_fail(path, 1, "empty file");
    }
    ++lineno;
    const auto head = tokenize(line);
    if (head.size() != 5 || lower(head[0]) != "%%matrixmarket" || lower(head[1]) != "matrix")
    {
        parse_fail(path, lineno, "missing '%%MatrixMarket matrix' header");
    }
    const std::string format   = lower(head[2]);
    const std::string field    = lower(head[3]);
    const std::string symmetry = lower(head[4]);
    if (format != "coordinate" && format != "array")
    {
        parse_fail(path, lineno, "unknown format '" + format + "'");
    }
    if (field == "complex" || field == "pattern")
    {
        throw Error(ErrorCode::UnsupportedField,
                    path.string() + ": field '" + field + "' is not supported");
    }
    if (field != "real" && field != "integer" && field != "double")
    {
        parse_fail(path, lineno, "unknown field '" + field + "'");
    }
    if (symmetry != "general" && !(symmetry == "symmetric" && format == "coordinate"))
    {
        throw Error(ErrorCode::UnsupportedField,
                    path.string() + ": symmetry '" + symmetry + "' is not supported for " +
                        format + " format");
    }

    std::vector<std::string_view> tok;
    auto next_data_line = [&]() -> bool {
        while (std::getline(in, line))
        {
            ++lineno;
            tok = tokenize(line);
            if (!tok.empty() && tok[0].front() != '%')
            {
                return true;
            }
        }
        return false;
    };

    if (!next_data_line())
    {
        parse_fail(path, lineno, "missing size line");
    }
    const bool coord = format == "coordinate";
    if (tok.size() != (coord ? 3u : 2u))
    {
        parse_fail(path, lineno, "malformed size line");
    }
    const long long rows = parse_int(tok[0], path, lineno);
    const long long cols = parse_int(tok[1], path, lineno);
    if (rows < 1 || cols < 1)
    {
        parse_fail(path, lineno, "dimensions must be positive");
    }
    if (symmetry == "symmetric" && rows != cols)
    {
        parse_fail(path, lineno, "symmetric matrix must be square");
    }
    RMatrix M = RMatrix::Zero(rows, cols);

    if (coord)
    {
        const long long nnz = parse_int(tok[2], path, lineno);
        if (nnz < 0)
        {
            parse_fail(path, lineno, "negative entry count");
        }
        for (long long e = 0; e < nnz; ++e)
        {
            if (!next_data_line())
            {
                parse_fail(path, lineno, "expected " + std::to_string(nnz) + " entries, found " +
                                             std::to_string(e));
            }
            if (tok.size() != 3)
            {
                parse_fail(path, lineno, "coordinate entry needs 'row col value'");
            }
            const long long i = parse_int(tok[0], path, lineno);
            const long long j = parse_int(tok[1], path, lineno);
            const double v    = parse_real(tok[2], path, lineno);
            if (i < 1 || i > rows || j < 1 || j > cols)
            {
                parse_fail(path, lineno, "index out of range");
            }
            M(i - 1, j - 1) += v;
            if (symmetry == "symmetric" && i != j)
            {
                M(j - 1, i - 1) += v;
            }
        }
    }
    else
    {
        const long long count = rows * cols;
        long long seen        = 0;
        while (seen < count && next_data_line())
        {
            for (const auto& t : tok)
            {
                if (seen == count)
                {
                    parse_fail(path, lineno, "too many values");
                }
                M(seen % rows, seen / rows) = parse_real(t, path, lineno);
                ++seen;
            }
        }
        if (seen < count)
        {
            parse_fail(path, lineno, "expected " + std::to_string(count) + " values, found " +
                                         std::to_string(seen));
        }
    }
    if (next_data_line())
    {
        parse_fail(path, lineno, "trailing data");
    }
    return M;
}

void write_matrix_market(const std::filesystem::path& path, const RMatrix& M)
{
    std::string out = "%%MatrixMarket matrix array real general\n";
    out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + "\n";
    for (Eigen::Index j = 0; j < M.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < M.rows(); ++i)
        {
            if (!std::isfinite(M(i, j)))
            {
                throw Error(ErrorCode::InvalidArgument, "cannot write a non-finite entry");
            }
            out += format_double(M(i, j));
            out += '\n';
        }
    }
    spit(path, out);
}

LtiSystem load_system(const std::filesystem::path& a, const std::filesystem::path& b,
                      const std::filesystem::path& c)
{
    const RMatrix A  = read_matrix_market(a);
    const RMatrix B  = read_matrix_market(b);
    const RMatrix C  = read_matrix_market(c);
    const auto n     = A.rows();
    const auto as_vec = [n](const RMatrix& M, const char* name) -> RVector {
        if (M.cols() == 1 && M.rows() == n)
        {
            return M.col(0);
        }
        if (M.rows() == 1 && M.cols() == n)
        {
            return M.row(0).transpose();
        }
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(name) + " must be a vector of length " + std::to_string(n));
    };
    if (A.cols() != n)
    {
        throw Error(ErrorCode::DimensionMismatch, "A must be square");
    }
    return LtiSystem(A, as_vec(B, "b"), as_vec(C, "c"));
}

ShiftSet read_shift_file(const std::filesystem::path& path)
{
    json j;
    try
    {
        j = json::parse(slurp(path));
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    std::vector<Complex> vals;
    try
    {
        vals = to_complex_list(j);
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    if (vals.empty())
    {
        throw Error(ErrorCode::EmptySet, path.string() + ": no shifts");
    }
    for (const auto& v : vals)
    {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        {
            throw Error(ErrorCode::ParseError, path.string() + ": non-finite shift");
        }
    }
    return ShiftSet::from_values_checked(vals);
}

void write_shift_file(const std::filesystem::path& path, const ShiftSet& shifts)
{
    spit(path, complex_list(shifts.values()).dump() + "\n");
}

RunReport make_report(const ReportConfig& config, const IrkaResult& result)
{
    RunReport rep;
    rep.config      = config;
    rep.status      = result.status;
    rep.history     = result.history;
    rep.certificate = result.certificate;
    rep.realified   = result.realified;
    if (result.model)
    {
        rep.final_shifts = result.model->sigma;
        rep.final_poles  = result.model->mu;
        rep.final_residues.assign(result.model->residues.data(),
                                  result.model->residues.data() +
                                      result.model->residues.size());
    }
    return rep;
}

std::string report_json(const RunReport& report)
{
    const auto& cfg = report.config;
    json c;
    c["a"]    = cfg.a_path;
    c["b"]    = cfg.b_path;
    c["c"]    = cfg.c_path;
    c["r"]    = cfg.irka.r;
    c["tol"]  = num(cfg.irka.tol);
    c["max_iter"] = cfg.irka.max_iter;
    c["mode"] = mode_name(cfg.irka.update_mode);
    if (cfg.irka.alpha.kind == AlphaSchedule::Kind::Backoff)
    {
        c["alpha"] = "backoff";
    }
    else
    {
        c["alpha"] = num(cfg.irka.alpha.value);
    }
    c["stop"] = stop_name(cfg.irka.stop_rule);
    c["init"] = cfg.init;
    c["seed"] = cfg.irka.seed;
    c["cycle_max_period"] = cfg.irka.cycle_max_period;
    c["verify"] = cfg.irka.verify;

    json j;
    j["format"]     = "irka-report";
    j["version"]    = 1;
    j["config"]     = c;
    j["status"]     = to_string(report.status);
    j["iterations"] = report.history.size();

    json fin;
    fin["shifts"]   = complex_list(report.final_shifts);
    fin["poles"]    = complex_list(report.final_poles);
    fin["residues"] = complex_list(report.final_residues);
    j["final"]      = fin;

    j["certificate"] = report.certificate ? certificate_json(*report.certificate) : json(nullptr);
    if (report.realified)
    {
        json s;
        s["A"] = matrix_json(report.realified->A);
        s["b"] = vector_json(report.realified->b);
        s["c"] = vector_json(report.realified->c);
        j["realified"] = s;
    }
    else
    {
        j["realified"] = nullptr;
    }

    json hist = json::array();
    for (const auto& r : report.history)
    {
        hist.push_back(record_json(r));
    }
    j["history"] = hist;
    return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const RunReport& report)
{
    spit(path, report_json(report));
}

RunReport read_report(const std::filesystem::path& path)
{
    RunReport rep;
    try
    {
        const json j = json::parse(slurp(path));
        if (j.at("format") != "irka-report")
        {
            throw Error(ErrorCode::ParseError, path.string() + ": not a run report");
        }
        const auto& c      = j.at("config");
        auto& cfg          = rep.config;
        cfg.a_path         = c.at("a").get<std::string>();
        cfg.b_path         = c.at("b").get<std::string>();
        cfg.c_path         = c.at("c").get<std::string>();
        cfg.irka.r         = c.at("r").get<std::size_t>();
        cfg.irka.tol       = to_num(c.at("tol"));
        cfg.irka.max_iter  = c.at("max_iter").get<int>();
        cfg.irka.update_mode =
            c.at("mode") == "vanilla" ? UpdateMode::Vanilla : UpdateMode::Blended;
        if (c.at("alpha") == "backoff")
        {
            cfg.irka.alpha = AlphaSchedule::backoff();
        }
        else
        {
            cfg.irka.alpha = AlphaSchedule::constant(to_num(c.at("alpha")));
        }
        cfg.irka.stop_rule        = parse_stop(c.at("stop").get<std::string>());
        cfg.init                  = c.at("init").get<std::string>();
        cfg.irka.seed             = c.at("seed").get<std::uint64_t>();
        cfg.irka.cycle_max_period = c.at("cycle_max_period").get<int>();
        cfg.irka.verify           = c.at("verify").get<bool>();

        rep.status = parse_status(j.at("status").get<std::string>());
        const auto& fin    = j.at("final");
        rep.final_shifts   = to_complex_list(fin.at("shifts"));
        rep.final_poles    = to_complex_list(fin.at("poles"));
        rep.final_residues = to_complex_list(fin.at("residues"));
        if (!j.at("certificate").is_null())
        {
            rep.certificate = certificate_from(j.at("certificate"));
        }
        if (!j.at("realified").is_null())
        {
            const auto& s = j.at("realified");
            const auto r  = static_cast<Eigen::Index>(s.at("b").size());
            RMatrix A(r, r);
            RVector b(r);
            RVector cc(r);
            for (Eigen::Index i = 0; i < r; ++i)
            {
                for (Eigen::Index k = 0; k < r; ++k)
                {
                    A(i, k) = to_num(s.at("A").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)));
                }
                b(i)  = to_num(s.at("b").at(static_cast<std::size_t>(i)));
                cc(i) = to_num(s.at("c").at(static_cast<std::size_t>(i)));
            }
            rep.realified = LtiSystem(std::move(A), std::move(b), std::move(cc));
        }
        for (const auto& r : j.at("history"))
        {
            rep.history.push_back(record_from(r));
        }
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return rep;
}

std::string history_csv(const RunReport& report)
{
    std::string out = "k,d,h,q_norm,kappa_C,kappa_V,cos_angle,eps,eps_bullet,flipped,alpha_used\n";
    for (const auto& r : report.history)
    {
        out += std::to_string(r.k);
        for (double v : {r.d, r.h, r.q_norm, r.kappa_C, r.kappa_V, r.cos_angle, r.eps,
                         r.eps_bullet})
        {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += std::to_string(r.flipped);
        out += ',';
        out += format_double(r.alpha_used);
        out += '\n';
    }
    return out;
}

void write_history_csv(const RunReport& report, const std::filesystem::path& path)
{
    spit(path, history_csv(report));
}

} // namespace irka::io
