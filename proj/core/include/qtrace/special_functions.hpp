#pragma once

namespace qtrace {

/// Cosine integral Ci(x) = gamma + log x + int_0^x (cos t - 1)/t dt, x > 0.
double cos_integral(double x);

/// Sine integral Si(x) = int_0^x sin t / t dt.
double sin_integral(double x);

/// f(x) = Ci(2x) sin x - Si(2x) cos x + log 2 sin x for x > 0.
double kernel_f(double x);

}  // namespace qtrace
