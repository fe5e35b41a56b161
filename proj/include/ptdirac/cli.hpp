#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptdirac/closedform.hpp"
#include "ptdirac/couplings.hpp"
#include "ptdirac/errors.hpp"

namespace ptdirac::cli {

enum ExitCode : int { Ok = 0, VerifyFailed = 1, InputError = 2, NumericalFailure = 3 };

enum class Format { Csv, Records };

/// Malformed or incomplete run configuration.
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Flat `key = value` text. `#` starts a comment, blank lines are skipped,
/// a repeated key is an error.
std::map<std::string, std::string> parse_key_values(std::string_view text);

struct Overrides {
    std::optional<int> grid_n;
    std::optional<double> box;
    std::optional<double> tol;
};

struct RunConfig {
    std::map<std::string, std::string> values; // as read, for the record
    std::string family_name;
    CouplingFamily family = CouplingFamily::oscillator({});
    GridSpec grid;
    int n_max = 0;
    std::optional<int> n;
    int branch = +1;
    double tol = 1e-6;       // closed form vs shooting
    double dirac_tol = 1e-3; // closed form vs matrix oracle
    SpinorForm form = SpinorForm::DiracConsistent;
    std::string source = "auto"; // Rosen-Morse spinor: auto | printed | oracle
    double window_lo = -1e300;
    double window_hi = 1e300;

    int require_n() const;
};

/// `base_dir` resolves a relative `generic.file`.
RunConfig make_config(const std::map<std::string, std::string>& kv, const Overrides& ov = {},
                      const std::string& base_dir = ".");
RunConfig load_config(const std::string& path, const Overrides& ov = {});

struct Output {
    std::string text;
    int exit_code = Ok;
};

Output cmd_spectrum(const RunConfig& cfg, Format fmt, bool verify);
Output cmd_spinor(const RunConfig& cfg, Format fmt);
Output cmd_verify(const RunConfig& cfg, Format fmt);
Output cmd_ptcheck(const RunConfig& cfg, Format fmt);
Output cmd_norm(const RunConfig& cfg, Format fmt);

/// Write to `path.tmp.<pid>` and rename over `path`.
void write_atomic(const std::string& path, const std::string& text);

/// Whole command line, argv[0] included. Errors go to `err`, data to the
/// --out file or to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ptdirac::cli
