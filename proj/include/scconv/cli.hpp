#pragma once

#include <iosfwd>
#include <string>

namespace scconv {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitGuardTrip = 3,
    kExitIoError = 4,
};

/// Entry point of the converter-sim tool. Verbs: run, sweep, catalog (list | dump | run), check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Output stem of one sweep member: <scenario>_<gain>_<value>.
std::string sweep_run_name(const std::string& scenario, const std::string& gain, double value);

} // namespace scconv
