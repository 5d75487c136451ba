// Generated by tools/gen_snr_table.cpp. Do not edit.
#include "snr_table.hpp"

namespace bnmfse::detail {

const std::array<SnrShapePoint, 66> kSnrShapeTable = {{
    {-20.0, 1.3638167641},
    {-19.0, 1.3637414362},
    {-18.0, 1.3636256416},
    {-17.0, 1.3634488039},
    {-16.0, 1.3631808080},
    {-15.0, 1.3627782573},
    {-14.0, 1.3621797198},
    {-13.0, 1.3612999722},
    {-12.0, 1.3600234533},
    {-11.0, 1.3581974309},
    {-10.0, 1.3556257776},
    {-9.0, 1.3520646844},
    {-8.0, 1.3472220482},
    {-7.0, 1.3407624906},
    {-6.0, 1.3323198398},
    {-5.0, 1.3215182340},
    {-4.0, 1.3080016800},
    {-3.0, 1.2914699953},
    {-2.0, 1.2717169122},
    {-1.0, 1.2486643635},
    {0.0, 1.2223863457},
    {1.0, 1.1931168318},
    {2.0, 1.1612389939},
    {3.0, 1.1272568247},
    {4.0, 1.0917539164},
    {5.0, 1.0553465061},
    {6.0, 1.0186382704},
    {7.0, 0.9821828999},
    {8.0, 0.9464579393},
    {9.0, 0.9118506848},
    {10.0, 0.8786548105},
    {11.0, 0.8470751819},
    {12.0, 0.8172379650},
    {13.0, 0.7892034084},
    {14.0, 0.7629792632},
    {15.0, 0.7385334698},
    {16.0, 0.7158053313},
    {17.0, 0.6947148424},
    {18.0, 0.6751701485},
    {19.0, 0.6570732879},
    {20.0, 0.6403244535},
    {21.0, 0.6248250405},
    {22.0, 0.6104797293},
    {23.0, 0.5971978295},
    {24.0, 0.5848940685},
    {25.0, 0.5734889787},
    {26.0, 0.5629089970},
    {27.0, 0.5530863706},
    {28.0, 0.5439589333},
    {29.0, 0.5354698032},
    {30.0, 0.5275670361},
    {31.0, 0.5202032613},
    {32.0, 0.5133353147},
    {33.0, 0.5069238820},
    {34.0, 0.5009331590},
    {35.0, 0.4953305321},
    {36.0, 0.4900862826},
    {37.0, 0.4851733143},
    {38.0, 0.4805669043},
    {39.0, 0.4762444773},
    {40.0, 0.4721853995},
    {41.0, 0.4683707938},
    {42.0, 0.4647833720},
    {43.0, 0.4614072845},
    {44.0, 0.4582279841},
    {45.0, 0.4552321047},
}};

}  // namespace bnmfse::detail
