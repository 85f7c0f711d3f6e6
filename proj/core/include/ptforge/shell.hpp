#pragma once

#include "ptforge/config.hpp"
#include "ptforge/emit.hpp"

// Command orchestration: executes one resolved RunConfig against the library
// and assembles the serializable result.
namespace ptforge::shell {

// Runs the configured command and returns its table.  Library errors
// propagate (the caller maps them to exit codes); a feasibility run whose
// every grid point is infeasible comes back with exit_status 3.
Table run(const RunConfig& cfg);

// Complete CLI entry point: parse, run, write, and map failures to exit
// codes (0 success, 1 usage, 2 runtime/IO, 3 infeasible feasibility query).
int main_entry(int argc, const char* const* argv);

}  // namespace ptforge::shell
