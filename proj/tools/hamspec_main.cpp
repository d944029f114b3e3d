#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hamspec/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"regular spectral approximation of singular discrete "
                 "Hamiltonian systems"};
    app.require_subcommand(1);

    std::string config_path, z_str, out_dir = ".";
    long b = -1;
    bool oracle = false;
    for (const char* name :
         {"validate", "classify", "eigs", "approx", "resolvent"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required();
        sub->add_option("--b", b, "truncation point");
        sub->add_option("--z", z_str, "spectral point re,im");
        sub->add_flag("--oracle", oracle, "cross-check with the determinant scan");
        sub->add_option("--out", out_dir, "output directory");
    }
    CLI11_PARSE(app, argc, argv);

    hamspec::CmdOptions opt;
    opt.oracle = oracle;
    opt.out_dir = out_dir;
    if (b >= 0) opt.b = b;
    if (!z_str.empty()) {
        const auto comma = z_str.find(',');
        try {
            opt.z = hamspec::cplx{
                std::stod(z_str.substr(0, comma)),
                comma == std::string::npos ? 0.0 : std::stod(z_str.substr(comma + 1))};
        } catch (const std::exception&) {
            std::cerr << "error: --z expects re,im\n";
            return hamspec::kExitUsage;
        }
    }

    try {
        const hamspec::RunConfig cfg = hamspec::load_config(config_path);
        return hamspec::run_command(app.get_subcommands().front()->get_name(),
                                    cfg, opt, std::cout);
    } catch (const hamspec::ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hamspec::kExitValidation;
    } catch (const hamspec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hamspec::kExitUsage;
    }
}
