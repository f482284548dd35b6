#include "trapfgr/series.hpp"

#include <algorithm>

namespace tfgr {

CVec Series::get(int m, int k) const
{
    auto it = c.find({m, k});
    return it == c.end() ? CVec(CVec::Zero(n)) : it->second;
}

void Series::add(int m, int k, const CVec& v)
{
    if (m + k > degree) return;
    auto it = c.find({m, k});
    if (it == c.end())
        c.emplace(std::make_pair(m, k), v);
    else
        it->second += v;
}

Series Series::operator+(const Series& o) const
{
    Series r(n, std::min(degree, o.degree));
    for (const auto& [key, v] : c) r.add(key.first, key.second, v);
    for (const auto& [key, v] : o.c) r.add(key.first, key.second, v);
    return r;
}

Series Series::scaled(cplx a) const
{
    Series r = *this;
    for (auto& kv : r.c) kv.second *= a;
    return r;
}

Series Series::times_field(const CVec& f) const
{
    Series r = *this;
    for (auto& kv : r.c) kv.second = kv.second.cwiseProduct(f);
    return r;
}

Series Series::operator*(const Series& o) const
{
    Series r(n, std::min(degree, o.degree));
    for (const auto& [ka, va] : c)
        for (const auto& [kb, vb] : o.c) {
            const int m = ka.first + kb.first, k = ka.second + kb.second;
            if (m + k <= r.degree) r.add(m, k, va.cwiseProduct(vb));
        }
    return r;
}

Series Series::without_constant() const
{
    Series r = *this;
    r.c.erase({0, 0});
    return r;
}

Forcing cubic_forcing(const RVec& phi, const Series& I1, const Series& I2)
{
    const CVec p = to_complex(phi);
    const CVec p2 = p.cwiseProduct(p);
    const Series S = I1.times_field(2.0 * p) + I1 * I1 + I2 * I2;
    Series base(I1.n, I1.degree);
    base.add(0, 0, p);
    Forcing F;
    F.A = (S * I2).scaled(-1.0).without_constant();
    F.B = (S * (base + I1) + I1.times_field(-2.0 * p2)).without_constant();
    return F;
}

}  // namespace tfgr
