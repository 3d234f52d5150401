#pragma once

namespace tool {

// parse argv, run one subcommand, write its manifest; returns the exit status
int run(int argc, char** argv);

}  // namespace tool
