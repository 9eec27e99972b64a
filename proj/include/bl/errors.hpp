// Error types shared across modules.

#ifndef BL_ERRORS_HPP
#define BL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bl {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BL_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                            \
        explicit Name(const std::string& what = #Name) : Error(what) {} \
    }

BL_DEFINE_ERROR(PointOutsideChart);
BL_DEFINE_ERROR(WrongGenus);
BL_DEFINE_ERROR(PoleTransit);
BL_DEFINE_ERROR(StepFailure);
BL_DEFINE_ERROR(NotClosed);
BL_DEFINE_ERROR(NotHyperbolic);
BL_DEFINE_ERROR(DegenerateCurve);
BL_DEFINE_ERROR(EmbeddednessLost);
BL_DEFINE_ERROR(ConvexityViolation);
BL_DEFINE_ERROR(FlowCollapsed);
BL_DEFINE_ERROR(BudgetExhausted);
BL_DEFINE_ERROR(SweepoutDegenerated);
BL_DEFINE_ERROR(IntersectionPatternFailed);
BL_DEFINE_ERROR(InvalidPattern);
BL_DEFINE_ERROR(PreconditionFailed);
BL_DEFINE_ERROR(ConfigError);

#undef BL_DEFINE_ERROR

} // namespace bl

#endif
