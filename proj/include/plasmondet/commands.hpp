#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plasmondet/config.hpp"
#include "plasmondet/io.hpp"

// Figure-reproduction commands behind the CLI. Each returns a table (and
// an image for `image`) plus "note: name = value" summary lines.
namespace plasmondet {

struct CommandResult {
  std::string command;
  Table table;
  std::optional<ImageMap> image;
  std::vector<std::string> notes;
};

// theta_deg, R_no_atoms, R_with_atoms, delta_R, N_max
CommandResult run_angle_sweep(const RunConfig& config);
// density_cm3, detuning_gamma, theta_deg, N_max; theta maximized per cell
CommandResult run_qnd_map(const RunConfig& config);
// detuning_MHz, gap_nm, delta_R
CommandResult run_spectrum(const RunConfig& config);
// time_s, delta_R
CommandResult run_trace(const RunConfig& config);
// x_um, y_um, delta_R (matrix output writes the image grid)
CommandResult run_image(const RunConfig& config);
// theta_sp_deg, R_min, t2_surface, critical_angle_deg, decay_length_nm
CommandResult run_resonance(const RunConfig& config);

const std::vector<std::string_view>& command_names();
// Throws InvalidArgument for an unknown name.
CommandResult run_command(std::string_view name, const RunConfig& config);

// Incidence angle used by fixed-angle commands: configured, or the
// resonance angle of the stack.
double probe_angle(const RunConfig& config);

// Command line, resolved configuration, resolved materials, then notes.
std::vector<std::string> result_header(const Config& config, const RunConfig& resolved,
                                       const CommandResult& result);

void write_result(std::ostream& out, const Config& config, const RunConfig& resolved,
                  const CommandResult& result);

}  // namespace plasmondet
