"""
Muestreo exacto del proceso puntual coalescente de una muestra de un proceso
de nacimiento y muerte crítico, espectros de frecuencias esperados y
verificación de los límites de muestra grande.
"""

__version__ = "1.0.0"
