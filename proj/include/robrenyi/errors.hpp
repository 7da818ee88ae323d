#pragma once

#include <stdexcept>
#include <string>

namespace robrenyi {

// Base class for every error raised by the library. Each concrete type
// carries a stable name() used by the CLI to build machine-readable
// error objects.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define ROBRENYI_DEFINE_ERROR(Type)                              \
    class Type : public Error {                                  \
    public:                                                      \
        explicit Type(const std::string& what) : Error(#Type, what) {} \
    }

ROBRENYI_DEFINE_ERROR(NonFiniteIntegral);
ROBRENYI_DEFINE_ERROR(UnsupportedAlpha);
ROBRENYI_DEFINE_ERROR(EmptySample);
ROBRENYI_DEFINE_ERROR(NonFiniteCriterion);
ROBRENYI_DEFINE_ERROR(DomainError);
ROBRENYI_DEFINE_ERROR(NoConvergence);
ROBRENYI_DEFINE_ERROR(DegenerateSample);
ROBRENYI_DEFINE_ERROR(NoRoot);
ROBRENYI_DEFINE_ERROR(SingularS);
ROBRENYI_DEFINE_ERROR(SingularMAlpha);
ROBRENYI_DEFINE_ERROR(SingularVX);
ROBRENYI_DEFINE_ERROR(UnsupportedModel);
ROBRENYI_DEFINE_ERROR(DegenerateScale);
ROBRENYI_DEFINE_ERROR(RankDeficient);
ROBRENYI_DEFINE_ERROR(ParseError);
ROBRENYI_DEFINE_ERROR(TooFewReplicates);

#undef ROBRENYI_DEFINE_ERROR

} // namespace robrenyi
