#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amalgam {

// one command invocation over one input set; batch runs produce one report per input
struct InputDigest {
    std::string path;
    std::string digest;
};

struct Verdict {
    std::string name;
    std::optional<bool> value;  // nullopt = undecided within budget
};

struct WitnessNote {
    std::string name;
    std::string detail;
};

struct CommandReport {
    std::string command;
    std::vector<InputDigest> inputs;
    std::vector<Verdict> verdicts;
    std::vector<WitnessNote> witnesses;
    std::int64_t elapsed_ms = 0;
    bool budget_hit = false;
    int exit_code = 0;
};

// the two renderings carry the same verdicts in the same order
std::string report_to_json(const std::vector<CommandReport>& reports);
std::string report_to_text(const std::vector<CommandReport>& reports);

// exit codes: 0 pass, 1 verdict false, 2 parse or precondition, 3 undecided within budget
int worse_exit(int a, int b);

int run_cli(int argc, const char* const* argv);

}  // namespace amalgam
