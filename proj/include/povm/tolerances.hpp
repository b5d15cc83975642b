#pragma once

namespace povm {

struct Tolerances {
    double herm = 1e-9;
    double psd = 1e-9;
    double trace = 1e-9;
    double sum = 1e-9;
    double prob = 1e-9;
    double eig = 1e-9;
    double dtv = 1e-8;
};

// Process-wide tolerances. Set once at startup (config overrides); read everywhere.
Tolerances& tolerances();

// Restores the previous tolerances on destruction. Handy in tests.
class ScopedTolerances {
public:
    explicit ScopedTolerances(const Tolerances& t) : saved_(tolerances()) { tolerances() = t; }
    ~ScopedTolerances() { tolerances() = saved_; }
    ScopedTolerances(const ScopedTolerances&) = delete;
    ScopedTolerances& operator=(const ScopedTolerances&) = delete;

private:
    Tolerances saved_;
};

} // namespace povm
