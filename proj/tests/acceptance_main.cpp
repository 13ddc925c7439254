#include <iostream>

#include "CLI11.hpp"
#include "momentlab/acceptance.hpp"

using namespace momentlab;

int main(int argc, char** argv)
{
  CLI::App app{"acceptance criteria, one PASS/FAIL line each"};
  acceptance::Options options;
  int criterion = 0;
  app.add_flag("--quick", options.quick, "fewer samples, same tolerances");
  app.add_option("--seed", options.seed, "random seed")->capture_default_str();
  app.add_option("--criterion", criterion, "run only this criterion")->check(CLI::Range(1, acceptance::kCriterionCount));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
    if (criterion != 0 && id != criterion) continue;
    const acceptance::CriterionResult r = acceptance::run_criterion(id, options);
    std::cout << acceptance::summary_line(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
