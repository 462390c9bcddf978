#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/identity.hpp"
#include "pastetrace/session.hpp"

namespace pastetrace {

/// Line-oriented edit script, one command per line:
///
///   CLOCK <ms> | CLOCK +<ms>          set or advance the session clock
///   SEED <n>                          seed for ProjectIDs minted by OPEN NEW
///   OPEN NEW <name> | OPEN <path>     start a project or open a file
///   TYPE <offset|END> "<text>"        text is a JSON string literal
///   DELETE <offset> <length>
///   COPY <start> <end> <slot>         CUT takes the same arguments
///   PASTE <offset|END> CLIP <slot> | TEXT "<text>" | FILE <path>
///   CLIPOUT <slot> <path>             write a clipboard slot to a file
///   SAVE <path>
///
/// Relative paths resolve against the script's base directory. Without SEED,
/// ProjectIDs derive from the script text and the machine's InstallID so that
/// rerunning a script reproduces the same bytes.
struct ScriptResult {
    std::vector<std::filesystem::path> saved;
    std::vector<std::string> warnings;
};

ScriptResult run_script_text(std::string_view script, const std::filesystem::path& base_dir, const Machine& machine);

ScriptResult run_script(const std::filesystem::path& script_file, const std::filesystem::path& machine_state_dir);

}  // namespace pastetrace
