#pragma once

namespace mfg {

/// Entry point of the mfglab command-line tool; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace mfg
