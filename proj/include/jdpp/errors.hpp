#pragma once

#include <stdexcept>
#include <string>

namespace jdpp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoleError : public Error { public: using Error::Error; };
class ConvergenceError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
// 1 + L (or a conjugated analogue) is numerically singular.
class SingularError : public Error { public: using Error::Error; };
class SizeError : public Error { public: using Error::Error; };
class SpectrumError : public Error { public: using Error::Error; };
class ConstructionError : public Error { public: using Error::Error; };
class DivergenceError : public Error { public: using Error::Error; };

}  // namespace jdpp
