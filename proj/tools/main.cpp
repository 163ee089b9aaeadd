#include <iostream>
#include <string>
#include <vector>

#include "polyround/cli.hpp"

namespace {

const char* kUsage = R"(usage: polyround <command> [flags]

commands:
  solve-gap-cap   round a capacitated GAP instance (derandomized on cost;
                  --randomize for the seeded randomized walk)
  solve-outlier   schedule with a hard profit floor (derandomized on cost;
                  --randomize for the seeded randomized walk)
  solve-maxmin    max-min fair allocation; instances with caps use the
                  capacitated rounding, others the configuration-LP pipeline
  oracle          exact brute-force optimum for tiny instances
  montecarlo      empirical marginals over repeated seeded runs

flags:
  --input PATH        instance file (JSON; see README)     [required]
  --seed U64          RNG seed (default 0)
  --trials N          montecarlo trials (default 1000)
  --epsilon R         outlier accuracy parameter override
  --precision R       binary-search precision override
  --lambda R          maxmin: big-item threshold divisor override
  --eps1 R            maxmin: pruning parameter override
  --output PATH       write the report to a file instead of stdout
  --format F          text | structured (default text)
  --randomize         use the seeded randomized walk instead of the
                      cost-derandomized one

exit codes: 0 ok, 2 infeasible, 3 parse error, 4 budget exceeded,
            5 internal invariant violation
)";

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        std::cout << kUsage;
        return args.empty() ? polyround::cli::kParseError : polyround::cli::kOk;
    }
    return polyround::cli::run_cli(args, std::cout, std::cerr);
}
