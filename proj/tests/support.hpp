#pragma once

#include <stdexcept>
#include <string>

// The what() of the std::invalid_argument `f` throws, or "" if it returns.
template <class F>
std::string invalid_argument_message(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}
