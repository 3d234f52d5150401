// n = 5 carousel: monodromy along a few energy levels.
#include <cstdio>

#include <sbk/carousel.hpp>

int main(int argc, char** argv) {
  using namespace sbk::carousel;
  double top = argc > 1 ? std::atof(argv[1]) : 40;
  const double hmin = 2.5 * (1 + std::sqrt(5.0));
  std::printf("%10s %12s %12s %14s %6s\n", "H", "tau", "trace A", "angle A", "j");
  for (double dH : {0.5, 2.0, 5.0, 10.0, 20.0, top}) {
    auto M = monodromy(decagon_at_level(hmin + dH));
    std::printf("%10.4f %12.8f %12.8f %14.10f %6d\n", M.level, M.period, M.trace, M.angle, M.shift_index);
  }
}
