#include "commands.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>

using namespace conemult::cli;

namespace {

void apply_thread_env() {
    const char* env = std::getenv("CONEMULT_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw UsageError("CONEMULT_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(n));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cone multiplier experiments"};
    app.require_subcommand(1);

    auto* besi = app.add_subcommand("besicovitch", "Build the rectangle and box families for level k");
    int k = 0;
    std::string out_dir;
    double h = 0x1.0p-18;
    besi->add_option("--k", k, "Level, N = 2^k")->required();
    besi->add_option("--out", out_dir, "Output directory")->required();
    besi->add_option("--raster-step", h, "Raster step of the union measure");

    auto* ratio = app.add_subcommand("ratio", "Square-function ratio experiment");
    std::string config_path;
    bool fast = false;
    ratio->add_option("--config", config_path, "JSON config")->required();
    ratio->add_flag("--fast", fast, "Halve the Monte Carlo budget");

    auto* szego = app.add_subcommand("szego", "Cayley transform and Szego kernel checks");
    szego->add_option("--config", config_path, "JSON config")->required();
    szego->add_flag("--fast", fast, "Halve every sample budget");

    auto* validate = app.add_subcommand("validate", "Run property suites");
    std::string suite;
    std::uint64_t seed = 1;
    double boundary_value = 0.5;
    validate->add_option("--suite", suite, "jordan, engine, szego or all")
        ->required()
        ->check(CLI::IsMember({"jordan", "engine", "szego", "all"}));
    validate->add_flag("--fast", fast, "Halve every sample budget");
    validate->add_option("--seed", seed, "Seed of the sample streams");
    validate->add_option("--boundary-value", boundary_value, "Symbol value on the frequency hyperplane (test fixture)");

    auto* jordan = app.add_subcommand("jordan", "Jordan algebra utilities");
    auto* jcheck = jordan->add_subcommand("check", "Determinant, minors and cone membership of one element");
    jordan->require_subcommand(1);
    std::string algebra;
    std::vector<double> coords;
    jcheck->add_option("--algebra", algebra, "spin:<n> or sym:<r>")->required();
    jcheck->add_option("--x", coords, "Coordinates")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        apply_thread_env();
        if (*besi) {
            cmd_besicovitch(k, out_dir, h, std::cerr);
            return kOk;
        }
        if (*ratio) {
            cmd_ratio(load_config(config_path), fast, std::cerr);
            return kOk;
        }
        if (*szego) {
            cmd_szego(load_config(config_path), fast, std::cerr);
            return kOk;
        }
        if (*validate) return cmd_validate(suite, fast, seed, boundary_value, std::cout);
        if (*jcheck) return cmd_jordan_check(algebra, coords, std::cout);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
