#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal quantization of probability laws under Bregman divergences"};
    app.require_subcommand(1);

    bregquant::cli::CommonArgs args;
    std::uint64_t seed_value = 0;

    auto wire = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "run configuration (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed_value, "override the config seed");
        return sub;
    };

    auto* quantize =
        wire(app.add_subcommand("quantize", "solve a 1D quantizer and export codebook + report"));
    auto* verify =
        wire(app.add_subcommand("verify", "audit a codebook CSV against a config"));
    auto* reconstruct = wire(
        app.add_subcommand("reconstruct", "solve, then export the piecewise density estimate"));
    auto* quantize2d =
        wire(app.add_subcommand("quantize2d", "sample-based 2D run: codes + assignments"));

    CLI11_PARSE(app, argc, argv);

    for (auto* sub : {quantize, verify, reconstruct, quantize2d})
        if (sub->parsed() && sub->count("--seed") > 0) args.seed = seed_value;

    if (quantize->parsed()) return bregquant::cli::cmd_quantize(args);
    if (verify->parsed()) return bregquant::cli::cmd_verify(args);
    if (reconstruct->parsed()) return bregquant::cli::cmd_reconstruct(args);
    return bregquant::cli::cmd_quantize2d(args);
}
