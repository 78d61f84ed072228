// SPDX-License-Identifier: Apache-2.0
//
// bdris: BS-side beyond-diagonal RIS massive MIMO simulation library
// Copyright (C) 2026 The bdris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDRIS_TYPES_HPP
#define BDRIS_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;
    using Point3 = Eigen::Vector3d;
    using Index = Eigen::Index;

    constexpr double pi = 3.14159265358979323846;
    constexpr double speed_of_light = 299792458.0; // m/s

    // Error hierarchy. The CLI maps ConfigError to exit code 1 and every other Error to 2.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    class GeometryError : public Error
    {
    public:
        using Error::Error;
    };

    class ModelError : public Error
    {
    public:
        using Error::Error;
    };

    class NumericError : public Error
    {
    public:
        using Error::Error;
    };

    // Stacked training matrix without full column rank; callers may re-draw the training configs.
    class EstimationRankError : public NumericError
    {
    public:
        using NumericError::NumericError;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
}

#endif
