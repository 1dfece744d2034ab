#pragma once

namespace recourse {

// Entry point behind the rstree binary. Subcommands: solve, evaluate,
// audit, gen-synth. Exit codes: 0 success, 1 runtime failure, 2
// configuration error, 3 infeasible problem, 4 timeout with partial
// results (outputs are still written).
int run_cli(int argc, char** argv);

}  // namespace recourse
