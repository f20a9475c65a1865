#include <CLI11.hpp>

#include "dropsim/species.hpp"

// Placeholder driver while the solver layers come up; verbs are registered so
// the interface is stable. run/batch/oracle1d/compare get wired to the time
// loop and the 1D reference solver.
int main(int argc, char** argv) {
    CLI::App app{"dropsim: suspended-droplet evaporation solver"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run a single case");
    auto* batch = app.add_subcommand("batch", "run a list of cases");
    auto* oracle = app.add_subcommand("oracle1d", "run the 1D spherical reference");
    auto* cmp = app.add_subcommand("compare", "compare two history CSVs");
    (void)run;
    (void)batch;
    (void)oracle;
    (void)cmp;
    CLI11_PARSE(app, argc, argv);
    return 0;
}
