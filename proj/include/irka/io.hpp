#ifndef IRKA_IO_HPP
#define IRKA_IO_HPP

///
/// \file io.hpp
///
/// Matrix Market ingestion, shift files, and the run report in its JSON and
/// CSV views.
///
/// Every floating point number is written in the shortest form that reads
/// back to the same double; non-finite values become the strings "inf",
/// "-inf" and "nan".
///

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <irka/diagnostics.hpp>
#include <irka/irka.hpp>
#include <irka/lti.hpp>
#include <irka/shifts.hpp>

namespace irka::io
{

///
/// Reads `matrix coordinate real|integer general|symmetric` and
/// `matrix array real|integer general`. Symmetric coordinate input is
/// mirrored. Throws `ParseError` (with the line number), `UnsupportedField`
/// or `IoError`.
///
RMatrix read_matrix_market(const std::filesystem::path& path);

/// Dense array format, column-major, shortest round-trip digits.
void write_matrix_market(const std::filesystem::path& path, const RMatrix& M);

/// `b` and `c` may be stored as n x 1 or 1 x n. Throws `DimensionMismatch`.
LtiSystem load_system(const std::filesystem::path& a, const std::filesystem::path& b,
                      const std::filesystem::path& c);

/// JSON array of `[re, im]`; conjugate partners are matched within
/// `pair_tol` and snapped exactly. Throws `NotConjugateClosed`.
ShiftSet read_shift_file(const std::filesystem::path& path);
void write_shift_file(const std::filesystem::path& path, const ShiftSet& shifts);

std::string format_double(double v);

struct ReportConfig
{
    std::string a_path;
    std::string b_path;
    std::string c_path;
    std::string init = "logspace"; ///< "logspace", "random" or a file path
    IrkaConfig irka;
};

struct RunReport
{
    ReportConfig config;
    RunStatus status;
    std::vector<IterationRecord> history;
    std::vector<Complex> final_shifts;
    std::vector<Complex> final_poles;
    std::vector<Complex> final_residues;
    std::optional<BackwardCertificate> certificate;
    std::optional<LtiSystem> realified;
};

RunReport make_report(const ReportConfig& config, const IrkaResult& result);

/// Deterministic text: identical input gives byte-identical output.
std::string report_json(const RunReport& report);
void write_report(const std::filesystem::path& path, const RunReport& report);
RunReport read_report(const std::filesystem::path& path);

/// Header `k,d,h,q_norm,kappa_C,kappa_V,cos_angle,eps,eps_bullet,flipped,alpha_used`.
std::string history_csv(const RunReport& report);
void write_history_csv(const RunReport& report, const std::filesystem::path& path);

} // namespace irka::io

#endif /* IRKA_IO_HPP */
