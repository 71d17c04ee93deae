from .haar import (
    SubbandSet,
    DetailBands,
    WaveletPyramid,
    dwt2,
    idwt2,
    dwt2_multi,
    idwt2_multi,
    max_depth,
    detail_energy,
    pyramid_energy,
)
