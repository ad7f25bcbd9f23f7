// Regenerates the bundled synthetic fixation dataset.
#include <iostream>

#include <CLI11.hpp>

#include "salvol/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic two-peak fixation dataset as CSV"};
    auto cfg = salvol::bundled_synthetic_config();
    std::string out;
    app.add_option("--out", out, "output CSV (stdout if omitted)");
    app.add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    app.add_option("--observers", cfg.observers, "observers per image")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const auto csv = salvol::serialize_fixations(salvol::make_synthetic_dataset(cfg), salvol::FixationFormat::csv);
        if (out.empty())
            std::cout << csv;
        else
            salvol::write_file(out, csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
