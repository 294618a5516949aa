#include "snake/numerics.hpp"

namespace snake {

const NumericsSettings& settings() {
  static const NumericsSettings instance{};
  return instance;
}

}  // namespace snake
