#include "adaptsim/csv.hpp"

#include <cmath>
#include <cstdio>

namespace adaptsim {

void export_csv(const Trace& trace, const std::string& path, const CsvLayout& layout,
                const std::vector<double>* pe_lambda_min) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);

    const auto& psi = trace.channel("psi");
    const auto& u = trace.channel("u");
    const auto& th = trace.channel("theta_hat");
    const auto& v = trace.channel("V");
    const auto& eps = trace.channel("eps");
    const int d = static_cast<int>(th.front().size());

    std::fputs("t", f);
    for (int i = 0; i < layout.q; ++i) std::fprintf(f, ",x1_%d", i);
    for (int i = 0; i < layout.n - layout.q; ++i) std::fprintf(f, ",x2_%d", i);
    std::fputs(",psi,u", f);
    for (int i = 0; i < d; ++i) std::fprintf(f, ",theta_hat_%d", i);
    std::fputs(",V,eps,pe_lambda_min\n", f);

    for (std::size_t k = 0; k < trace.size(); ++k) {
        std::fprintf(f, "%.17g", trace.times[k]);
        for (int i = 0; i < layout.n; ++i)
            std::fprintf(f, ",%.17g", trace.states[k][static_cast<std::size_t>(i)]);
        std::fprintf(f, ",%.17g,%.17g", psi[k][0], u[k][0]);
        for (int i = 0; i < d; ++i)
            std::fprintf(f, ",%.17g", th[k][static_cast<std::size_t>(i)]);
        std::fprintf(f, ",%.17g,%.17g", v[k][0], eps[k][0]);
        if (pe_lambda_min && k < pe_lambda_min->size() && !std::isnan((*pe_lambda_min)[k]))
            std::fprintf(f, ",%.17g", (*pe_lambda_min)[k]);
        else
            std::fputs(",", f);
        std::fputs("\n", f);
    }
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace adaptsim
