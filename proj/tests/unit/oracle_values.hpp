// SPDX-License-Identifier: Apache-2.0
//
// qce - channel estimation for coarsely quantized MIMO receivers
// Copyright (C) 2026 The qce authors
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
// Generated by tests/oracles/generate.py (SciPy/NumPy). Do not edit.
#pragma once

#include <complex>
#include <vector>

namespace oracle {

inline const std::vector<double> kCdfX{-6, -2.5, -1, -0.10000000000000001, 0, 0.29999999999999999, 1.7, 4};
inline const std::vector<double> kCdf{9.8658764503769458e-10, 0.0062096653257761323, 0.15865525393145707, 0.46017216272297101, 0.5, 0.61791142218895256, 0.95543453724145699, 0.99996832875816688};
inline const std::vector<double> kErfInvP{1.0000000000000001e-09, 0.10000000000000001, 0.5, 0.68268949213708585, 0.90000000000000002, 0.999, 0.99999999999900002};
inline const std::vector<double> kErfInv{8.8622692545275803e-10, 0.088855990494257686, 0.47693627620446988, 0.70710678118654746, 1.1630871536766743, 2.3267537655135242, 5.042031898572696};
inline const std::vector<double> kOptimalStep{1.595769121605731, 0.99568668661015569, 0.58601944323928379, 0.33520061305654264, 0.1881387901046398};
inline const std::vector<double> kOptimalMse{0.36338022763241873, 0.11884605038407722, 0.037439659391523543, 0.011542884431350899, 0.0034952113615055688};
inline const std::vector<int> kGainBits{1, 1, 2, 2, 3, 3, 4, 8};
inline const std::vector<double> kGainStep{1.4142135623730951, 1.4142135623730951, 0.99570000000000003, 0.69999999999999996, 0.58599999999999997, 0.40000000000000002, 0.3352, 0.030800000000000001};
inline const std::vector<double> kGainVariance{1, 2.5, 1, 3, 1, 0.5, 1, 1};
inline const std::vector<double> kGain{0.79788456080286552, 0.50462650440403212, 0.97864829763060657, 0.6153236105001092, 0.99715590478304894, 0.99596489269839616, 0.99966736905427878, 0.99999997208832825};
inline const std::vector<double> kQuantVariance{1.0000000000000004, 1.0000000000000002, 1.1266156740183848, 1.3575518585561379, 1.0519557038900702, 0.5229396348880655, 1.0180990459391519, 1.0001580524137514};
inline const std::vector<std::complex<double>> kGenieOneCluster{{1, 0}, {-0.43511336642938298, 0.89648650099285365}, {-0.6100192967984539, -0.774828425442317}, {0.94709975165637539, -0.20654888021823209}, {-0.22305013899324574, 0.92015595271044714}, {-0.7085857268200717, -0.5856863907482095}, {0.808160813892429, -0.36749638324701961}, {-0.022922846780071903, 0.85292156547432363}};
inline const std::vector<std::complex<double>> kGenieTwoClusters{{1, 0}, {0.17622077664512342, 0.90260178855942474}, {-0.66960828753238333, 0.24291720505554698}, {-0.17671039443539205, -0.42281690563130969}, {0.25330720796333639, -0.034045392768410301}, {-0.10904413037944566, 0.18476070223842031}, {-0.19115669166601046, -0.20093382972856103}, {0.22575672949772657, -0.22849802344314421}};
inline const std::vector<std::complex<double>> kPilots2{{0.63245553203367588, 0}, {0.89442719099991597, 0.89442719099991586}};
inline const std::vector<std::complex<double>> kPilots4{{0.64699663922063055, 0}, {0.7969959367727063, 0.33012652616750471}, {0.76249285166302339, 0.76249285166302327}, {0.49518978925125723, 1.1954939051590596}};
inline const std::vector<std::vector<std::complex<double>>> kLmmseCh{
    {{1, 0}, {0.59999999999999998, 0.29999999999999999}, {0.20000000000000001, -0.10000000000000001}},
    {{0.59999999999999998, -0.29999999999999999}, {1.2, 0}, {0.5, 0.20000000000000001}},
    {{0.20000000000000001, 0.10000000000000001}, {0.5, -0.20000000000000001}, {0.80000000000000004, 0}}};
inline const std::vector<std::vector<std::complex<double>>> kLmmseOneBitP1{
    {{0.5707645154344777, -0.0011382176034642436}, {0.22400016766293021, 0.14001650633310944}, {0.050901362662904764, -0.093651519006832412}},
    {{0.22837853267480437, -0.14189891487498241}, {0.60741989603741342, 0.00049178404892757932}, {0.20287148170684613, 0.11107200095858474}},
    {{0.049661424684650034, 0.092449752430554408}, {0.19589916993111703, -0.10830595986765502}, {0.49898685498213713, 0.00062957024714912374}}};
inline const std::vector<std::vector<std::complex<double>>> kLmmseOneBitP2{
    {{0.26951853893392119, 0.00010267732012805841}, {0.089932574858571007, 0.058149446633970453}, {0.016285950746617102, -0.04379294518605964}, {0.3515820322405892, -0.35339498953918846}, {0.18705024658800723, -0.034976361631383977}, {-0.038813148342780386, -0.080278746974549495}},
    {{0.090837676379510929, -0.058580335150425503}, {0.28394141333260692, -5.701710289915396e-05}, {0.080852888725805844, 0.047191124890732072}, {0.037470731724378536, -0.19306393616322134}, {0.36156106456138765, -0.36088955941490841}, {0.17009831479813103, -0.041802835902646038}},
    {{0.016012651912637545, 0.043915648074722521}, {0.079653683408954498, -0.046830981664155863}, {0.23663406723168598, -4.1553752020501156e-05}, {0.077657879271531519, 0.038419711928969695}, {0.037591906889485743, -0.160031806873453}, {0.31878998936803427, -0.31770125233074686}}};
inline const std::vector<std::vector<std::complex<double>>> kLmmseThreeBitP1{
    {{0.55311134412987095, -0.00074577365701779686}, {0.15576455257453811, 0.10644477621406596}, {0.031344698198813546, -0.095280394669011836}},
    {{0.17216431718499492, -0.11631208865923845}, {0.53589752407151447, 0.00035720708906870435}, {0.16836478438962246, 0.10230176495878951}},
    {{0.027664250147576661, 0.090151045169752406}, {0.14140265387124054, -0.088186712336644588}, {0.52571899677637635, 0.00038856656794906388}}};
inline const std::vector<double> kHalfNormalThresholds{0.5, 1, 1.5};
inline const std::vector<double> kHalfNormalProbs{0.29999999999999999, 0.56000000000000005, 0.76000000000000001};
inline constexpr double kHalfNormalXi = 1.2874485246381429;
inline const std::vector<std::complex<double>> kDensitySample{{0.29999999999999999, -0.20000000000000001}, {-1.1000000000000001, 0.40000000000000002}, {0.69999999999999996, 0.90000000000000002}};
inline constexpr double kLogDensity = -7.5292155780946199;

}  // namespace oracle
