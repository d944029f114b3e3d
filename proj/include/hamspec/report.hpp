#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamspec/classify.hpp"
#include "hamspec/extension.hpp"
#include "hamspec/spectral.hpp"

namespace hamspec {

// Exit codes of the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // usage or IO failure
inline constexpr int kExitValidation = 2;  // model or boundary data rejected
inline constexpr int kExitSpectral = 3;    // spectral-point error (resolvent hit
                                           // the spectrum, tail divergence)
inline constexpr int kExitAmbiguous = 4;   // classification undecided

struct RunConfig {
    explicit RunConfig(SystemCoefficients s) : system(std::move(s)) {}

    SystemCoefficients system;
    double shift = 0.0;                 // global spectral shift applied to the
                                        // coefficients before any computation
    std::optional<LimitType> case_override;
    std::optional<SseDescriptor> sse;   // natural descriptor when absent
    std::optional<RegularBC> regular_bc;  // direct truncated boundary pair;
                                          // bypasses the singular descriptor
                                          // for eigs/resolvent
    double frame_lambda0 = 0.0;         // base point for the psi basis
    std::vector<long> schedule;
    double tail_tol = 1e-11;
    double cluster_tol = 1e-8;
    double definiteness_tol = 1e-10;
    long max_index = 3;
    double conv_tol = 1e-7;
    bool emit_csv = true, emit_json = true, emit_svg = true;
    std::optional<HamSequence> source;  // resolvent right-hand side
};

// Parses the JSON config document; throws ContractViolation on schema errors.
RunConfig parse_config(const std::string& json_text);
// Reads and parses a config file; throws Error("cannot read ...") on IO.
RunConfig load_config(const std::string& path);

struct CmdOptions {
    std::optional<long> b;
    std::optional<cplx> z;
    bool oracle = false;
    std::string out_dir = ".";
};

int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_eigs(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out);
int cmd_approx(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out);
int cmd_resolvent(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out);

// Dispatches by command name; unknown names exit with the usage code.
int run_command(const std::string& name, const RunConfig& cfg,
                const CmdOptions& opt, std::ostream& out);

}  // namespace hamspec
