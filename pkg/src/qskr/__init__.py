"""Secret key rate estimates for CV-QKD over free-space satellite links with
hybrid Poissonian + Gaussian noise."""

from .gmm import (
    GaussianComponent,
    GaussianMixture,
    affine_map,
    convolve_gaussian,
    entropy_bounds,
    mc_entropy_oracle,
    pdf_eval,
)
from .noise_channel import (
    ChannelUse,
    HybridNoiseParams,
    TransmittedSignal,
    channel_capacity,
    hybrid_noise_mixture,
    received_signal_mixture,
    snr_db,
    snr_of,
)
from .atmosphere import (
    BeamGeometry,
    LinkProfile,
    TurbulenceParams,
    altitude_to_tau,
    beam_wandering_params,
    lognormal_pdtc_pdf,
    pdtc_cdf,
    pdtc_pdf,
    sample_transmission,
    sample_transmissions,
)
from .skr import (
    DetectorParams,
    NoiseReferral,
    SkrBreakdown,
    SymplecticSpectrum,
    UnphysicalParameters,
    fading_average_skr,
    g_von_neumann,
    holevo_chi_be,
    noise_referral,
    secret_key_rate,
    symplectic_spectrum,
)

__version__ = "0.1.0"
