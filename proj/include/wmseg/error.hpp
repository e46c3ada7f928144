#pragma once

#include <stdexcept>
#include <string>

namespace wmseg {

// Out-of-range parameters and malformed arguments.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request that the data cannot satisfy.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoWatermarkedPixels : public DataError {
 public:
  NoWatermarkedPixels() : DataError("no watermarked pixels") {}
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wmseg
