#include "pastetrace/identity.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "pastetrace/errors.hpp"

namespace pastetrace {

namespace fs = std::filesystem;

namespace {

UuidGenerator& default_generator() {
    thread_local UuidGenerator gen;
    return gen;
}

}  // namespace

std::string render_identity_file(const InstallId& id) { return id.str() + "\n"; }

InstallId parse_identity_file(std::string_view content) {
    if (!content.empty() && content.back() == '\n') content.remove_suffix(1);
    auto id = InstallId::parse(content);
    if (!id) throw IdentityError("corrupt identity file");
    return *id;
}

InstallId load_or_create_install_id(const fs::path& machine_state_dir) {
    return load_or_create_install_id(machine_state_dir, default_generator());
}

InstallId load_or_create_install_id(const fs::path& machine_state_dir, UuidGenerator& gen) {
    const fs::path file = machine_state_dir / kInstallIdFile;
    std::error_code ec;
    if (fs::exists(file, ec)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IdentityError("cannot read identity file " + file.string());
        std::ostringstream content;
        content << in.rdbuf();
        return parse_identity_file(content.str());
    }
    fs::create_directories(machine_state_dir, ec);
    if (!fs::is_directory(machine_state_dir))
        throw IdentityError("cannot create machine state directory " + machine_state_dir.string());

    InstallId id(gen.next());
    // Write then rename so a concurrent reader never sees a half-written file.
    const fs::path tmp = machine_state_dir / (std::string(kInstallIdFile) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IdentityError("cannot write identity file in " + machine_state_dir.string());
        out << render_identity_file(id);
    }
    fs::rename(tmp, file, ec);
    if (ec) throw IdentityError("cannot install identity file: " + ec.message());
    return id;
}

Project new_project(const InstallId& install, std::string_view name) {
    return new_project(install, name, default_generator());
}

Project new_project(const InstallId& install, std::string_view name, UuidGenerator& gen) {
    if (name.empty()) throw ValidationError("project name must not be empty");
    Project project;
    project.name = std::string(name);
    project.meta.install_id = install;
    project.meta.project_id = ProjectId(gen.next());
    return project;
}

Machine Machine::load(const fs::path& state_dir) { return {state_dir, load_or_create_install_id(state_dir)}; }

Machine Machine::load(const fs::path& state_dir, UuidGenerator& gen) {
    return {state_dir, load_or_create_install_id(state_dir, gen)};
}

}  // namespace pastetrace
