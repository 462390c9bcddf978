#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pastetrace/metacomment.hpp"
#include "pastetrace/uuid.hpp"

namespace pastetrace {

inline constexpr std::string_view kInstallIdFile = "install_id";

/// Reads `install_id` from the machine state directory, creating it on first
/// use. A present but malformed file is an IdentityError, never regenerated.
InstallId load_or_create_install_id(const std::filesystem::path& machine_state_dir);
InstallId load_or_create_install_id(const std::filesystem::path& machine_state_dir, UuidGenerator& gen);

std::string render_identity_file(const InstallId& id);
InstallId parse_identity_file(std::string_view content);

struct Project {
    std::string name;
    MetaComment meta;
};

Project new_project(const InstallId& install, std::string_view name);
Project new_project(const InstallId& install, std::string_view name, UuidGenerator& gen);

/// A simulated machine: a state directory plus the identity persisted in it.
struct Machine {
    std::filesystem::path state_dir;
    InstallId install_id;

    static Machine load(const std::filesystem::path& state_dir);
    static Machine load(const std::filesystem::path& state_dir, UuidGenerator& gen);
};

}  // namespace pastetrace
