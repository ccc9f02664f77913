#pragma once

// Glue between the naive oracle types and the library's Eigen types.

#include "oracle.hpp"
#include "starsec/isac.hpp"

namespace support {

using namespace starsec;

inline VectorXcd to_eigen(const oracle::Vec& v)
{
    VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

inline RowVectorXcd to_row(const oracle::Vec& v)
{
    return to_eigen(v).transpose();
}

inline oracle::Vec from_eigen(const VectorXcd& v)
{
    return oracle::Vec(v.data(), v.data() + v.size());
}

inline oracle::Vec from_row(const RowVectorXcd& v)
{
    return oracle::Vec(v.data(), v.data() + v.size());
}

inline MatrixXcd to_eigen(const oracle::Mat& m)
{
    MatrixXcd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[0].size(); ++j) out(i, j) = m[i][j];
    return out;
}

inline channel::ChannelRealization to_channel(const oracle::Instance& in)
{
    channel::ChannelRealization ch;
    ch.bs_ris = to_eigen(in.H);
    for (int m = 0; m < in.M; ++m) {
        ch.lu_direct.push_back(to_eigen(in.lu_d[m]));
        ch.lu_ris.push_back(to_eigen(in.lu_r[m]));
    }
    ch.eve_direct = to_eigen(in.eve_d);
    ch.eve_ris = to_eigen(in.eve_r);
    ch.st_direct = to_eigen(in.st_d);
    ch.st_ris = to_eigen(in.st_r);
    return ch;
}

inline isac::TransmitDesign to_design(const oracle::Instance& in)
{
    const MatrixXcd K = to_eigen(in.K);
    return isac::TransmitDesign{K.leftCols(in.M), K.rightCols(in.L)};
}

inline ris::CoefficientDiagonals to_phi(const oracle::Instance& in)
{
    return ris::CoefficientDiagonals{to_eigen(in.phi_a), to_eigen(in.phi_b)};
}

inline oracle::Vec random_filter(int n, std::mt19937_64& rng)
{
    return oracle::random_vec(n, rng);
}

} // namespace support
