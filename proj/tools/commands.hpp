#pragma once

#include "maxvol/config.hpp"

namespace maxvol::cli {

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 tolerance breach
// in --check mode.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitToleranceBreach = 4;

int cmd_price_forward(const RunConfig& cfg, bool check);
int cmd_price_backward(const RunConfig& cfg, bool check);
int cmd_compare(const RunConfig& cfg, bool check);
int cmd_recover(const RunConfig& cfg, bool check);
int cmd_density(const RunConfig& cfg, bool check);
int cmd_mc(const RunConfig& cfg, bool check);
int cmd_convergence(const RunConfig& cfg, bool check);

/// Reference config with every default explicit, including per-command
/// experiment blocks.
nlohmann::json reference_config();

}  // namespace maxvol::cli
