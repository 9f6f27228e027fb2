#include "trebeca/resolvers.hpp"

namespace trebeca {

bool ScriptedResolver::advance() {
  for (std::size_t j = taken_.size(); j-- > 0;) {
    if (taken_[j] + 1 < arities_[j]) {
      std::vector<std::uint32_t> next(taken_.begin(), taken_.begin() + static_cast<std::ptrdiff_t>(j));
      next.push_back(taken_[j] + 1);
      script_ = std::move(next);
      taken_.clear();
      arities_.clear();
      return true;
    }
  }
  return false;
}

}  // namespace trebeca
